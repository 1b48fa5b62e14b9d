from setuptools import setup, find_packages

setup(
    name="commuting-dilations",
    version="0.1.0",
    packages=find_packages(exclude=["examples", "examples.*"]),
    py_modules=["main_dilation"],
    include_package_data=True,
    package_data={"src.configuration": ["config.yaml"]},
    install_requires=[
        "numpy",
        "scipy",
        "pandas",
        "pydantic",
        "structlog",
        "jsonschema",
        "pyyaml",
        "python-dotenv",
    ],
    extras_require={"test": ["pytest", "hypothesis"]},
    entry_points={"console_scripts": ["dilation-cli=main_dilation:main"]},
)

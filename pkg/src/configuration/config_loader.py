# src/configuration/config_loader.py

import os
import re
import yaml
from pathlib import Path
from typing import Any, Literal
from dotenv import load_dotenv
from pydantic import BaseModel, Field, PositiveFloat, PositiveInt, NonNegativeInt, ValidationError
from src.common.logging.logger import CustomLogger, logger
from src.common.exception.custom_exception import CustomException


CONFIG_DIR = Path(__file__).resolve().parent


# --------------------------
# Schema Definitions
# --------------------------

class PathsConfig(BaseModel):
    fixtures_dir: str = Field(default="data/fixtures")
    sessions_dir: str = Field(default="sessions")

class LoggingConfig(BaseModel):
    level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"

class TolerancesConfig(BaseModel):
    rank_eps: PositiveFloat = 1e-9
    accept: PositiveFloat = 1e-8
    exact: PositiveFloat = 1e-10

class CapsConfig(BaseModel):
    max_gram_dimension: PositiveInt = 3
    max_intertwiner_dimension: PositiveInt = 3
    max_graded_dimension: PositiveInt = 4096

class DilationConfig(BaseModel):
    default_depth: PositiveInt = 4
    mu: NonNegativeInt = 0
    pad_mode: Literal["auto", "always"] = "auto"

class EndoConfig(BaseModel):
    random_samples: PositiveInt = 100
    seed: int = 1234

class ExportConfig(BaseModel):
    max_matrix_dimension: PositiveInt = 256
    word_table: bool = True

class ConfigSchema(BaseModel):
    paths: PathsConfig = Field(default_factory=PathsConfig)
    tolerances: TolerancesConfig = Field(default_factory=TolerancesConfig)
    caps: CapsConfig = Field(default_factory=CapsConfig)
    dilation: DilationConfig = Field(default_factory=DilationConfig)
    endo: EndoConfig = Field(default_factory=EndoConfig)
    export: ExportConfig = Field(default_factory=ExportConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

# --------------------------
# Config Loader
# --------------------------

class ConfigLoader:
    """Unified configuration loader with schema validation & defaults."""

    def __init__(self, env_path: str = ".env", config_path: str | Path = CONFIG_DIR / "config.yaml"):
        self.env_path = Path(env_path)
        self.config_path = Path(config_path)
        self.config: ConfigSchema | None = None

        try:
            self._load_env()
            self._load_config()
        except CustomException:
            raise
        except Exception as e:
            logger.error(f"ConfigLoader initialization failed: {e}")
            raise CustomException("ConfigLoader initialization failed", e, identity="config_schema")

    # --------------------------
    # Environment
    # --------------------------
    def _load_env(self):
        if self.env_path.exists():
            load_dotenv(self.env_path)
            logger.info(f".env loaded from {self.env_path}")

    def _resolve_env_vars(self, obj):
        if isinstance(obj, dict):
            return {k: self._resolve_env_vars(v) for k, v in obj.items()}
        if isinstance(obj, list):
            return [self._resolve_env_vars(v) for v in obj]
        if isinstance(obj, str):
            matches = re.findall(r"\$\{([^}]+)\}", obj)
            for env_var in matches:
                value = os.getenv(env_var)
                if value is None:
                    logger.warning(f"Environment variable {env_var} not set, leaving placeholder")
                else:
                    obj = obj.replace(f"${{{env_var}}}", value)
        return obj

    # --------------------------
    # Config Loading
    # --------------------------
    def _load_config(self):
        if not self.config_path.exists():
            raise FileNotFoundError(f"Config file not found: {self.config_path}")

        with open(self.config_path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}

        # Merge env-specific override if exists
        env = os.getenv("ENV", "dev")
        override_path = self.config_path.with_name(f"config.{env}.yaml")
        if override_path.exists():
            with open(override_path, "r", encoding="utf-8") as f:
                override = yaml.safe_load(f) or {}
            raw = self._merge_dicts(raw, override)

        resolved = self._resolve_env_vars(raw)

        try:
            self.config = ConfigSchema(**resolved)
            CustomLogger.set_level(self.config.logging.level)
            logger.info(f"Config validated and loaded successfully [{env}]")
        except ValidationError as ve:
            logger.error(f"Schema validation failed: {ve}")
            raise CustomException("Config validation failed", ve, identity="config_schema")

    def _merge_dicts(self, base, override):
        for k, v in override.items():
            if isinstance(v, dict) and isinstance(base.get(k), dict):
                base[k] = self._merge_dicts(base[k], v)
            else:
                base[k] = v
        return base

    # --------------------------
    # Accessors
    # --------------------------
    def get(self, key: str, default: Any = None):
        try:
            val = self.config.model_dump()
            for p in key.split("."):
                val = val[p]
            return val
        except (KeyError, TypeError):
            logger.warning(f"Config key missing: {key}, using default: {default}")
            return default

    def get_paths(self) -> PathsConfig:
        return self.config.paths

    def get_tolerance(self) -> TolerancesConfig:
        return self.config.tolerances

    def get_caps(self) -> CapsConfig:
        return self.config.caps

    def get_logging_config(self) -> LoggingConfig:
        return self.config.logging

    # --------------------------
    # Pipeline Configuration
    # --------------------------
    def get_dilation_config(self) -> DilationConfig:
        return self.config.dilation

    def get_endo_config(self) -> EndoConfig:
        return self.config.endo

    def get_export_config(self) -> ExportConfig:
        return self.config.export


# Instantiate config at import
config = ConfigLoader()

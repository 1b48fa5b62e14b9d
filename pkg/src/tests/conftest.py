# src/tests/conftest.py

from pathlib import Path

import numpy as np
import pytest

from src.configuration.config_loader import config
from src.components.linalg_core.matrix_ops import Tolerance
from src.utils import fixture_catalogue as catalogue


REPO_ROOT = Path(__file__).resolve().parents[2]
FIXTURES_DIR = REPO_ROOT / config.get_paths().fixtures_dir


@pytest.fixture
def tol():
    """Rank tolerance used across the suites."""
    return Tolerance(eps=1e-9)


@pytest.fixture
def rng():
    """Seeded generator so random operators repeat between runs."""
    return np.random.default_rng(20240611)


@pytest.fixture
def pauli_pair():
    """Bit flip and phase flip channels at p = q = 0.5."""
    return catalogue.pauli_pair(0.5, 0.5)


@pytest.fixture
def ando():
    """Scalar contractions t = 1/2, s = 1/3 over the trivial flip."""
    return catalogue.ando_rep()


@pytest.fixture
def pauli_rep():
    """Bit/phase flip Kraus operators as a representation over diag(1, 1, 1, -1)."""
    return catalogue.pauli_rep()


@pytest.fixture
def fixtures_dir():
    """Shipped JSON fixtures."""
    return FIXTURES_DIR


def random_unitary(rng: np.random.Generator, size: int) -> np.ndarray:
    z = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))

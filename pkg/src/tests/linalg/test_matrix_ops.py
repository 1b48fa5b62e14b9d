import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.common.exception.dilation_exceptions import InvalidInput, NotPositive, NotPartialIsometry
from src.components.linalg_core.matrix_ops import (
    Tolerance,
    as_matrix,
    adjoint,
    canonical_basis,
    extend_partial_isometry,
    isometry_residual,
    kernel_and_range,
    psd_sqrt,
    unitarity_residual,
)


def _random_matrix(seed: int, rows: int, cols: int, rank: int | None = None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    rank = min(rows, cols) if rank is None else rank
    left = rng.standard_normal((rows, rank)) + 1j * rng.standard_normal((rows, rank))
    right = rng.standard_normal((rank, cols)) + 1j * rng.standard_normal((rank, cols))
    return left @ right


def test_tolerance_rank_is_relative():
    tol = Tolerance(eps=1e-9)
    assert tol.rank(np.array([1.0, 1e-12])) == 1
    assert tol.rank(np.array([1e-20, 1e-30])) == 1
    assert tol.rank(np.zeros(3)) == 0
    assert tol.atol(0.5) == pytest.approx(1e-9)
    assert tol.atol(100.0) == pytest.approx(1e-7)


def test_as_matrix_rejects_non_finite_and_ragged_input():
    with pytest.raises(InvalidInput):
        as_matrix([[1.0, np.nan]])
    with pytest.raises(InvalidInput):
        as_matrix([1.0, 2.0])


def test_kernel_and_range_of_rank_one_matrix(tol):
    a = np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]])
    ker, ran = kernel_and_range(a, tol)
    assert ker.shape == (2, 1)
    assert ran.shape == (3, 1)
    assert np.allclose(a @ ker, 0.0, atol=1e-12)
    assert isometry_residual(ran) < 1e-12


def test_canonical_basis_depends_only_on_the_subspace(rng):
    span = rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2))
    mix = np.array([[2.0, 1.0j], [-1.0, 3.0]])
    q1, _ = np.linalg.qr(span)
    q2, _ = np.linalg.qr(span @ mix)
    b1 = canonical_basis(q1 @ adjoint(q1), 2)
    b2 = canonical_basis(q2 @ adjoint(q2), 2)
    assert np.allclose(b1, b2, atol=1e-10)


def test_psd_sqrt_squares_back(rng):
    z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    p = z @ adjoint(z)
    root = psd_sqrt(p)
    assert np.allclose(root @ root, p, atol=1e-9)
    assert np.allclose(root, adjoint(root))


def test_psd_sqrt_drops_rounding_level_eigenvalues():
    root = psd_sqrt(np.diag([1.0, 1e-15]))
    assert root[1, 1] == 0.0
    assert root[0, 0] == pytest.approx(1.0)
    assert psd_sqrt(np.diag([1.0, 1e-6]))[1, 1] == pytest.approx(1e-3)


def test_psd_sqrt_of_defect_projector_is_the_projector():
    half = np.sqrt(0.5)
    row = np.hstack([half * np.eye(2), half * np.array([[0.0, 1.0], [1.0, 0.0]])])
    defect = np.eye(4) - adjoint(row) @ row
    root = psd_sqrt(defect)
    assert np.allclose(root, defect, atol=1e-12)
    assert np.linalg.matrix_rank(root, tol=1e-6) == 2


def test_psd_sqrt_rejects_negative_spectrum():
    with pytest.raises(NotPositive):
        psd_sqrt(np.diag([1.0, -0.5]))


def test_psd_sqrt_rejects_non_hermitian():
    with pytest.raises(InvalidInput):
        psd_sqrt(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_extend_partial_isometry_to_unitary(tol):
    t0 = np.zeros((3, 3), dtype=np.complex128)
    t0[1, 0] = 1.0
    t = extend_partial_isometry(t0, tol)
    assert unitarity_residual(t) < 1e-12
    assert np.allclose(t[:, 0], t0[:, 0])


def test_extend_partial_isometry_rejects_contraction():
    with pytest.raises(NotPartialIsometry):
        extend_partial_isometry(0.5 * np.eye(2))


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    rows=st.integers(min_value=1, max_value=5),
    cols=st.integers(min_value=1, max_value=5),
    rank=st.integers(min_value=0, max_value=5),
)
def test_kernel_and_range_dimensions_add_up(seed, rows, cols, rank):
    rank = min(rank, rows, cols)
    a = _random_matrix(seed, rows, cols, rank) if rank else np.zeros((rows, cols))
    ker, ran = kernel_and_range(a, Tolerance(eps=1e-9))
    assert ker.shape[1] + ran.shape[1] == cols
    assert ran.shape[1] == rank
    if ker.shape[1]:
        assert np.linalg.norm(a @ ker) <= 1e-8 * max(1.0, np.linalg.norm(a))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), size=st.integers(min_value=1, max_value=5))
def test_psd_sqrt_of_gram_matrix(seed, size):
    z = _random_matrix(seed, size, size)
    p = z @ adjoint(z)
    root = psd_sqrt(p, Tolerance(eps=1e-9))
    assert np.linalg.norm(root @ root - p) <= 1e-8 * max(1.0, np.linalg.norm(p))

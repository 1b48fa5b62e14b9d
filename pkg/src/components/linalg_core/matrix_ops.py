# src/components/linalg_core/matrix_ops.py

from __future__ import annotations
from typing import Tuple

import numpy as np
import scipy.linalg as spla
from pydantic import BaseModel, ConfigDict, PositiveFloat

from src.common.logging.logger import logger
from src.common.exception.dilation_exceptions import InvalidInput, NotPositive, NotPartialIsometry
from src.configuration.config_loader import config


class Tolerance(BaseModel):
    """
    Relative tolerance for rank decisions.

    A singular value s counts as zero when s < eps * (largest singular value).
    Absolute checks scale eps by max(1, norm of the object checked).
    """

    model_config = ConfigDict(frozen=True)

    eps: PositiveFloat = 1e-9

    @classmethod
    def default(cls) -> "Tolerance":
        return cls(eps=config.get_tolerance().rank_eps)

    def rank(self, singular_values: np.ndarray) -> int:
        s = np.asarray(singular_values, dtype=float)
        if s.size == 0 or s.max() == 0.0:
            return 0
        return int(np.count_nonzero(s >= self.eps * s.max()))

    def atol(self, scale: float = 1.0) -> float:
        return self.eps * max(1.0, float(scale))


# --------------------------
# Matrix helpers
# --------------------------

def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return `a` as a 2-D complex128 array, rejecting ragged or non-finite input."""
    try:
        arr = np.asarray(a, dtype=np.complex128)
    except (TypeError, ValueError) as e:
        raise InvalidInput(f"{name} is not a numeric matrix", e)
    if arr.ndim != 2:
        raise InvalidInput(f"{name} must be 2-D, got shape {arr.shape}", context={"name": name})
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} has non-finite entries", context={"name": name})
    return arr


def adjoint(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def residual_norm(a: np.ndarray) -> float:
    """Frobenius norm; an upper bound for the operator norm that stays cheap on large blocks."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a))


def unitarity_residual(u: np.ndarray) -> float:
    eye = np.eye(u.shape[0], dtype=np.complex128)
    if u.shape[0] != u.shape[1]:
        return float("inf")
    return max(residual_norm(adjoint(u) @ u - eye), residual_norm(u @ adjoint(u) - eye))


def isometry_residual(v: np.ndarray) -> float:
    return residual_norm(adjoint(v) @ v - np.eye(v.shape[1], dtype=np.complex128))


def _fix_phases(q: np.ndarray) -> np.ndarray:
    # the largest-modulus entry of every column becomes real and positive
    if q.shape[1] == 0:
        return q
    idx = np.argmax(np.abs(q), axis=0)
    pivots = q[idx, np.arange(q.shape[1])]
    phases = pivots / np.abs(pivots)
    return q * phases.conj()[np.newaxis, :]


def canonical_basis(projector: np.ndarray, dim: int) -> np.ndarray:
    """
    Orthonormal basis of range(projector) that depends only on the subspace.

    Pivoted QR of the projector picks columns in a fixed order, so repeated
    runs (and different spanning sets of the same subspace) give the same basis.
    """
    n = projector.shape[0]
    if dim == 0:
        return np.zeros((n, 0), dtype=np.complex128)
    q, _, _ = spla.qr(projector, pivoting=True)
    return _fix_phases(q[:, :dim])


def kernel_and_range(a, tol: Tolerance | None = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Orthonormal bases of null(A) and col(A).

    Returns (kernel_basis, range_basis) with shapes (cols, cols - r) and (rows, r),
    where r is the numerical rank under `tol`.
    """
    tol = tol or Tolerance.default()
    a = as_matrix(a, "A")
    rows, cols = a.shape
    u, s, vh = spla.svd(a, full_matrices=True, lapack_driver="gesvd")
    r = tol.rank(s)

    ker = adjoint(vh[r:, :])
    ran = u[:, :r]
    kernel_basis = canonical_basis(ker @ adjoint(ker), cols - r)
    range_basis = canonical_basis(ran @ adjoint(ran), r)
    return kernel_basis, range_basis


def psd_sqrt(p, tol: Tolerance | None = None) -> np.ndarray:
    """
    Positive square root of a Hermitian psd matrix.

    Eigenvalues below eps * max(1, max|λ|) count as zero; the root vanishes on
    their eigenvectors.
    """
    tol = tol or Tolerance.default()
    p = as_matrix(p, "P")
    if p.shape[0] != p.shape[1]:
        raise InvalidInput(f"psd_sqrt needs a square matrix, got {p.shape}")

    scale = residual_norm(p)
    if residual_norm(p - adjoint(p)) > tol.atol(scale):
        raise InvalidInput("psd_sqrt input is not Hermitian", identity="hermitian")

    herm = 0.5 * (p + adjoint(p))
    evals, evecs = spla.eigh(herm)
    cut = tol.atol(float(np.max(np.abs(evals))) if evals.size else 0.0)
    if evals.size and evals.min() < -cut:
        raise NotPositive(
            "Matrix has a negative eigenvalue beyond tolerance",
            context={"min_eigenvalue": float(evals.min()), "floor": -cut},
        )
    if evals.size and evals.min() < 0.0:
        logger.warning("Clamping rounding-level negative eigenvalues", min_eigenvalue=float(evals.min()))

    kept = np.where(evals >= cut, evals, 0.0)
    root = (evecs * np.sqrt(kept)) @ adjoint(evecs)
    return 0.5 * (root + adjoint(root))


def partial_isometry_residual(t0: np.ndarray) -> float:
    return residual_norm(t0 @ adjoint(t0) @ t0 - t0)


def extend_partial_isometry(t0, tol: Tolerance | None = None) -> np.ndarray:
    """
    Extend a partial isometry C^p -> C^q to an isometry (or coisometry).

    The kernel basis of t0 is sent to the cokernel basis in basis order, so the
    result is deterministic; when p == q the result is unitary.
    """
    tol = tol or Tolerance.default()
    t0 = as_matrix(t0, "t0")
    q_dim, p_dim = t0.shape

    res = partial_isometry_residual(t0)
    if res > tol.atol(np.sqrt(max(t0.shape))):
        raise NotPartialIsometry(
            "t0 is not a partial isometry within tolerance",
            context={"residual": res, "shape": list(t0.shape)},
        )

    kernel, _ = kernel_and_range(t0, tol)
    cokernel, _ = kernel_and_range(adjoint(t0), tol)
    pairs = min(kernel.shape[1], cokernel.shape[1])

    t = t0 + cokernel[:, :pairs] @ adjoint(kernel[:, :pairs])
    logger.info(
        "Extended partial isometry",
        shape=[q_dim, p_dim],
        kernel_dim=kernel.shape[1],
        cokernel_dim=cokernel.shape[1],
    )
    return t

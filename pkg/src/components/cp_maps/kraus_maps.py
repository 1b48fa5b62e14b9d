# src/components/cp_maps/kraus_maps.py

from __future__ import annotations
from typing import Tuple, Sequence

import numpy as np
import scipy.linalg as spla
from pydantic import BaseModel, ConfigDict, PositiveInt, model_validator

from src.common.logging.logger import logger
from src.common.exception.dilation_exceptions import InvalidInput, NotContractive, NotPositive
from src.components.linalg_core.matrix_ops import (
    Tolerance,
    as_matrix,
    adjoint,
    residual_norm,
    kernel_and_range,
    _fix_phases,
)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


def matrix_unit(d: int, p: int, q: int) -> np.ndarray:
    e = np.zeros((d, d), dtype=np.complex128)
    e[p, q] = 1.0
    return e


class KrausFamily(BaseModel):
    """
    A CP map on d x d matrices, Θ(a) = Σ_i T_i a T_i*.

    An empty `ops` tuple is the zero map (what reduce_kraus returns for it).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    d: PositiveInt
    ops: Tuple[np.ndarray, ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _coerce_ops(cls, data):
        if not isinstance(data, dict):
            return data
        d = data.get("d")
        ops = []
        for idx, op in enumerate(data.get("ops", ()) or ()):
            mat = as_matrix(op, f"Kraus operator {idx}")
            if mat.shape != (d, d):
                raise InvalidInput(
                    f"Kraus operator {idx} has shape {mat.shape}, expected ({d}, {d})",
                    identity="kraus_shape",
                )
            ops.append(_frozen(mat))
        return {**data, "ops": tuple(ops)}

    @model_validator(mode="after")
    def _check_contractive(self):
        excess = self.contractivity_excess()
        if excess > Tolerance.default().atol(1.0):
            raise NotContractive(
                "Kraus family is not contractive: ||sum T_i T_i*|| exceeds 1",
                context={"excess": excess, "d": self.d, "size": self.n},
            )
        return self

    @property
    def n(self) -> int:
        return len(self.ops)

    @property
    def is_zero(self) -> bool:
        return all(not np.any(op) for op in self.ops)

    def stacked(self) -> np.ndarray:
        """Operators as an (N, d, d) array."""
        if not self.ops:
            return np.zeros((0, self.d, self.d), dtype=np.complex128)
        return np.stack(self.ops)

    def vectorized(self) -> np.ndarray:
        """d^2 x N matrix whose columns are the row-major vectorized operators."""
        return self.stacked().reshape(self.n, self.d * self.d).T

    def row(self) -> np.ndarray:
        """Block row [T_1 ... T_N] of shape d x (N d)."""
        if not self.ops:
            return np.zeros((self.d, 0), dtype=np.complex128)
        return np.hstack(self.ops)

    def contractivity_excess(self) -> float:
        if not self.ops:
            return 0.0
        ops = self.stacked()
        gram = np.einsum("ipq,irq->pr", ops, ops.conj())
        return float(max(spla.eigvalsh(0.5 * (gram + adjoint(gram))).max() - 1.0, 0.0))


class ChoiMatrix(BaseModel):
    """J(Θ) = Σ_{q,s} Θ(E_qs) ⊗ E_qs = Σ_i vec(T_i) vec(T_i)*, rows (p,q), columns (r,s)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    d: PositiveInt
    mat: np.ndarray

    @model_validator(mode="after")
    def _check_psd(self):
        mat = self.mat
        if mat.shape != (self.d ** 2, self.d ** 2):
            raise InvalidInput(f"Choi matrix must be {self.d ** 2} x {self.d ** 2}, got {mat.shape}")
        tol = Tolerance.default()
        scale = residual_norm(mat)
        if residual_norm(mat - adjoint(mat)) > tol.atol(scale):
            raise InvalidInput("Choi matrix is not Hermitian", identity="choi_hermitian")
        evals = spla.eigvalsh(0.5 * (mat + adjoint(mat)))
        if evals.size and evals.min() < -tol.atol(scale):
            raise NotPositive("Choi matrix has a negative eigenvalue", context={"min_eigenvalue": float(evals.min())})
        return self


# --------------------------
# Operations
# --------------------------

def _require_same_d(theta: KrausFamily, phi: KrausFamily):
    if theta.d != phi.d:
        raise InvalidInput(
            f"CP maps act on different algebras (d={theta.d} vs d={phi.d})",
            identity="dimension_match",
        )


def apply_cp(theta: KrausFamily, a) -> np.ndarray:
    a = as_matrix(a, "a")
    if a.shape != (theta.d, theta.d):
        raise InvalidInput(f"apply_cp expects a {theta.d} x {theta.d} matrix, got {a.shape}", identity="dimension_match")
    ops = theta.stacked()
    return np.einsum("ipq,qr,isr->ps", ops, a, ops.conj())


def matrix_unit_images(theta: KrausFamily) -> np.ndarray:
    """Array img[q, s] = Θ(E_qs), shape (d, d, d, d)."""
    d = theta.d
    img = np.zeros((d, d, d, d), dtype=np.complex128)
    for q in range(d):
        for s in range(d):
            img[q, s] = apply_cp(theta, matrix_unit(d, q, s))
    return img


def choi_matrix(theta: KrausFamily) -> ChoiMatrix:
    d = theta.d
    img = matrix_unit_images(theta)
    # J[(p,q),(r,s)] = Θ(E_qs)[p,r]
    mat = img.transpose(2, 0, 3, 1).reshape(d * d, d * d)
    return ChoiMatrix(d=d, mat=0.5 * (mat + adjoint(mat)))


def channel_from_choi(choi: ChoiMatrix, tol: Tolerance | None = None) -> KrausFamily:
    """Canonical Kraus family of a Choi matrix: one operator per nonzero eigenvalue, largest first."""
    tol = tol or Tolerance.default()
    d = choi.d
    evals, evecs = spla.eigh(choi.mat)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    keep = tol.rank(np.clip(evals, 0.0, None))
    vecs = _fix_phases(evecs[:, :keep])
    ops = [np.sqrt(evals[k]) * vecs[:, k].reshape(d, d) for k in range(keep)]
    return KrausFamily(d=d, ops=ops)


def reduce_kraus(family: KrausFamily, tol: Tolerance | None = None) -> KrausFamily:
    """
    Linearly independent Kraus family for the same map.

    An independent family comes back unchanged. Otherwise the new operators are
    Σ_i c_ib T_i where the columns c_b are the canonical basis of the orthogonal
    complement of the coefficient kernel {c : Σ c_i T_i = 0}.
    """
    tol = tol or Tolerance.default()
    if family.n == 0 or family.is_zero:
        return KrausFamily(d=family.d, ops=())

    vec = family.vectorized()
    _, coeff = kernel_and_range(adjoint(vec), tol)
    rank = coeff.shape[1]
    if rank == family.n:
        return family

    reduced = vec @ coeff
    d = family.d
    ops = [reduced[:, b].reshape(d, d) for b in range(rank)]
    logger.info("Reduced Kraus family", d=d, original_size=family.n, reduced_size=rank)
    return KrausFamily(d=d, ops=ops)


def generating_family(family: KrausFamily) -> KrausFamily:
    """The family itself, or the single operator {0} when it is the empty family of the zero map."""
    if family.n:
        return family
    return KrausFamily(d=family.d, ops=[np.zeros((family.d, family.d), dtype=np.complex128)])


def compose_cp(theta: KrausFamily, phi: KrausFamily) -> KrausFamily:
    """Θ∘Φ with Kraus family {T_i S_j} in lexicographic (i, j) order."""
    _require_same_d(theta, phi)
    ops = [t @ s for t in theta.ops for s in phi.ops]
    return KrausFamily(d=theta.d, ops=ops)


def commute_residual(theta: KrausFamily, phi: KrausFamily) -> float:
    _require_same_d(theta, phi)
    left = choi_matrix(compose_cp(theta, phi)).mat
    right = choi_matrix(compose_cp(phi, theta)).mat
    return residual_norm(left - right)


def maps_commute(theta: KrausFamily, phi: KrausFamily, tol: Tolerance | None = None) -> bool:
    tol = tol or Tolerance.default()
    scale = residual_norm(choi_matrix(compose_cp(theta, phi)).mat)
    return commute_residual(theta, phi) <= tol.atol(scale)


def choi_distance(theta: KrausFamily, phi: KrausFamily) -> float:
    _require_same_d(theta, phi)
    return residual_norm(choi_matrix(theta).mat - choi_matrix(phi).mat)


def multiplicativity_residual(theta: KrausFamily) -> float:
    """max ||Θ(ab) - Θ(a)Θ(b)|| over matrix units; zero exactly for *-endomorphisms."""
    d = theta.d
    img = matrix_unit_images(theta)
    worst = 0.0
    for p in range(d):
        for q in range(d):
            for r in range(d):
                for s in range(d):
                    prod = img[p, s] if q == r else np.zeros((d, d), dtype=np.complex128)
                    worst = max(worst, residual_norm(prod - img[p, q] @ img[r, s]))
    return worst


def scaled_family(d: int, ops: Sequence[np.ndarray], weights: Sequence[float]) -> KrausFamily:
    """Family {sqrt(w_i) A_i}; convenient for mixtures of unitaries."""
    return KrausFamily(d=d, ops=[np.sqrt(w) * np.asarray(a, dtype=np.complex128) for a, w in zip(ops, weights)])

# src/components/cp_maps/tensor_spaces.py

from __future__ import annotations
from typing import Literal, Tuple, List

import numpy as np
import scipy.linalg as spla
from pydantic import BaseModel, ConfigDict, NonNegativeInt, PositiveInt

from src.common.logging.logger import logger
from src.common.exception.dilation_exceptions import InvalidInput, TooLarge, ConstructionFailed
from src.configuration.config_loader import config
from src.components.linalg_core.matrix_ops import (
    Tolerance,
    adjoint,
    residual_norm,
    kernel_and_range,
)
from src.components.cp_maps.kraus_maps import (
    KrausFamily,
    matrix_unit_images,
    reduce_kraus,
    compose_cp,
    apply_cp,
    matrix_unit,
)


Order = Literal["phi_theta", "theta_phi"]


class GramSpace(BaseModel):
    """
    M ⊗_first M ⊗_second H realised through the Gram matrix of its generators.

    Generator (p, q, r, s, t) stands for E_pq ⊗ E_rs ⊗ e_t. order "phi_theta" is
    H_{Φ,Θ}, where <a1⊗b1⊗h1, a2⊗b2⊗h2> = <h1, Θ(b1* Φ(a1* a2) b2) h2>.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    order: Order
    d: PositiveInt
    gram: np.ndarray
    rank: NonNegativeInt

    @property
    def generators(self) -> List[Tuple[int, int, int, int, int]]:
        d = self.d
        return [(p, q, r, s, t) for p in range(d) for q in range(d) for r in range(d) for s in range(d) for t in range(d)]


class DirectStrongCommutation(BaseModel):
    verdict: bool
    isometry_residual: float
    gram_ranks: Tuple[int, int]
    submodule_ranks: Tuple[int, int]
    complement_dims: Tuple[int, int]


class IntertwinerSpace(BaseModel):
    """Orthonormal basis X_b of E_Θ and the operators T_Θ(X_b) = W_Θ* X_b."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    d: PositiveInt
    basis: Tuple[np.ndarray, ...]
    t_rep: KrausFamily
    gram_rank: NonNegativeInt

    @property
    def dim(self) -> int:
        return len(self.basis)


def _check_cap(d: int, cap: int, what: str):
    if d > cap:
        raise TooLarge(
            f"{what} is capped at d <= {cap}, got d = {d}",
            context={"d": d, "cap": cap},
        )


def _psd_rank(gram: np.ndarray, tol: Tolerance) -> int:
    evals = spla.eigvalsh(gram)
    return tol.rank(np.clip(evals, 0.0, None))


def identity_slot_vectors(d: int) -> np.ndarray:
    """Coefficients of E_pq ⊗ I ⊗ e_t over the generators; columns ordered (p, q, t)."""
    c = np.zeros((d ** 5, d ** 3), dtype=np.complex128)
    for p in range(d):
        for q in range(d):
            for t in range(d):
                col = (p * d + q) * d + t
                for r in range(d):
                    row = (((p * d + q) * d + r) * d + r) * d + t
                    c[row, col] = 1.0
    return c


def gram_tensor_space(
    theta: KrausFamily,
    phi: KrausFamily,
    order: Order = "phi_theta",
    tol: Tolerance | None = None,
    cap: int | None = None,
) -> GramSpace:
    tol = tol or Tolerance.default()
    cap = cap or config.get_caps().max_gram_dimension
    if theta.d != phi.d:
        raise InvalidInput("CP maps act on different algebras", identity="dimension_match")
    d = theta.d
    _check_cap(d, cap, "gram_tensor_space")

    first, second = (phi, theta) if order == "phi_theta" else (theta, phi)
    A = matrix_unit_images(first)   # A[q, q', r, r'] = first(E_qq')[r, r']
    B = matrix_unit_images(second)  # B[s, s', t, t'] = second(E_ss')[t, t']
    eye = np.eye(d)
    gram = np.einsum("pP,qQrR,sStT->pqrstPQRST", eye, A, B).reshape(d ** 5, d ** 5)
    gram = 0.5 * (gram + adjoint(gram))

    # ||a⊗I⊗h||^2 must equal <h, second(first(a*a)) h>
    c_id = identity_slot_vectors(d)
    slot = adjoint(c_id) @ gram @ c_id
    composed = matrix_unit_images(compose_cp(second, first))  # [q, q', t, t']
    expected = np.einsum("pP,qQtT->pqtPQT", eye, composed).reshape(d ** 3, d ** 3)
    slot_residual = residual_norm(slot - expected)
    if slot_residual > tol.atol(residual_norm(expected)):
        raise ConstructionFailed(
            "identity-slot norms disagree with the composed map",
            identity="identity_slot_norm",
            context={"residual": slot_residual, "order": order},
        )

    rank = _psd_rank(gram, tol)
    logger.info("Gram tensor space", order=order, d=d, generators=d ** 5, rank=rank)
    return GramSpace(order=order, d=d, gram=gram, rank=rank)


def strong_commute_direct(
    theta: KrausFamily,
    phi: KrausFamily,
    tol: Tolerance | None = None,
    cap: int | None = None,
) -> DirectStrongCommutation:
    """
    Compare H_{Φ,Θ} and H_{Θ,Φ} directly.

    a⊗I⊗h -> a⊗I⊗h must preserve inner products, and the orthogonal complements of
    the two submodules generated by these vectors must have equal dimension.
    """
    tol = tol or Tolerance.default()
    g1 = gram_tensor_space(theta, phi, "phi_theta", tol, cap)
    g2 = gram_tensor_space(theta, phi, "theta_phi", tol, cap)

    c_id = identity_slot_vectors(g1.d)
    a1 = adjoint(c_id) @ g1.gram @ c_id
    a2 = adjoint(c_id) @ g2.gram @ c_id
    iso = residual_norm(a1 - a2)

    r1, r2 = _psd_rank(a1, tol), _psd_rank(a2, tol)
    c1, c2 = g1.rank - r1, g2.rank - r2
    verdict = iso <= tol.atol(residual_norm(a1)) and c1 == c2

    logger.info("Direct strong-commutation test", verdict=verdict, isometry_residual=iso, complement_dims=[c1, c2])
    return DirectStrongCommutation(
        verdict=verdict,
        isometry_residual=iso,
        gram_ranks=(g1.rank, g2.rank),
        submodule_ranks=(r1, r2),
        complement_dims=(c1, c2),
    )


def intertwiner_space(
    theta: KrausFamily,
    tol: Tolerance | None = None,
    cap: int | None = None,
) -> IntertwinerSpace:
    """
    E_Θ = {X : H -> M⊗_Θ H, X a = (a⊗I) X}, computed in coordinates of M⊗_Θ H.

    M⊗_Θ H is spanned by E_pq ⊗ e_t with Gram matrix δ_pp' Θ(E_qq')[t, t'].
    """
    tol = tol or Tolerance.default()
    cap = cap or config.get_caps().max_intertwiner_dimension
    d = theta.d
    _check_cap(d, cap, "intertwiner_space")

    empty = IntertwinerSpace(d=d, basis=(), t_rep=KrausFamily(d=d, ops=()), gram_rank=0)
    if theta.n == 0 or theta.is_zero:
        return empty

    eye = np.eye(d)
    A = matrix_unit_images(theta)
    gram = np.einsum("pP,qQtT->pqtPQT", eye, A).reshape(d ** 3, d ** 3)
    gram = 0.5 * (gram + adjoint(gram))

    evals, evecs = spla.eigh(gram)
    order = np.argsort(evals)[::-1]
    evals, evecs = evals[order], evecs[:, order]
    rho = tol.rank(np.clip(evals, 0.0, None))
    if rho == 0:
        return empty

    root = np.sqrt(evals[:rho])
    Q = evecs[:, :rho]
    J = root[:, None] * adjoint(Q)        # generator coefficients -> coordinates
    J_pinv = Q / root[None, :]

    # left action of E_xy: generator (y, q, t) -> (x, q, t)
    blocks = []
    d3 = d ** 3
    for x in range(d):
        for y in range(d):
            L = np.zeros((d3, d3), dtype=np.complex128)
            for q in range(d):
                for t in range(d):
                    L[(x * d + q) * d + t, (y * d + q) * d + t] = 1.0
            lam = J @ L @ J_pinv
            a = matrix_unit(d, x, y)
            # row-major vec: vec(X a) = (I ⊗ a^T) vec X, vec(λ X) = (λ ⊗ I) vec X
            blocks.append(np.kron(np.eye(rho), a.T) - np.kron(lam, np.eye(d)))
    constraints = np.vstack(blocks)
    solutions, _ = kernel_and_range(constraints, tol)

    c_id = np.zeros((d3, d), dtype=np.complex128)
    for r in range(d):
        for t in range(d):
            c_id[(r * d + r) * d + t, t] = 1.0
    w_theta = J @ c_id

    basis, t_rep = [], []
    for b in range(solutions.shape[1]):
        X = np.sqrt(d) * solutions[:, b].reshape(rho, d)
        T = adjoint(w_theta) @ X
        pivot = T.reshape(-1)[np.argmax(np.abs(T))]
        phase = np.conj(pivot) / abs(pivot) if abs(pivot) > 0 else 1.0
        basis.append(X * phase)
        t_rep.append(T * phase)

    family = KrausFamily(d=d, ops=t_rep)
    expected_dim = reduce_kraus(theta, tol).n
    if len(basis) != expected_dim:
        raise ConstructionFailed(
            "intertwiner space dimension differs from the reduced Kraus count",
            identity="index_equality",
            context={"dim": len(basis), "reduced_size": expected_dim},
        )

    ortho = max(
        (residual_norm(adjoint(basis[i]) @ basis[j] - (np.eye(d) if i == j else 0.0))
         for i in range(len(basis)) for j in range(len(basis))),
        default=0.0,
    )
    recon = max(
        residual_norm(apply_cp(family, matrix_unit(d, p, q)) - A[p, q])
        for p in range(d) for q in range(d)
    )
    if ortho > tol.atol(np.sqrt(d)) or recon > tol.atol(1.0):
        raise ConstructionFailed(
            "intertwiners do not reproduce the map",
            identity="identity_representation",
            context={"orthonormality_residual": ortho, "reconstruction_residual": recon},
        )

    logger.info("Intertwiner space", d=d, dim=len(basis), gram_rank=rho)
    return IntertwinerSpace(d=d, basis=tuple(basis), t_rep=family, gram_rank=rho)

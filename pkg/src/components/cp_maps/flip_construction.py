# src/components/cp_maps/flip_construction.py

from __future__ import annotations
from typing import Literal, Sequence, Tuple

import numpy as np
import scipy.linalg as spla
from pydantic import BaseModel, ConfigDict, PositiveInt, model_validator

from src.common.logging.logger import logger
from src.common.exception.dilation_exceptions import (
    InvalidInput,
    InvalidFlip,
    NotCommuting,
    CoisometryCheckFailed,
    NotStronglyCommuting,
    ConstructionFailed,
)
from src.components.linalg_core.matrix_ops import (
    Tolerance,
    as_matrix,
    adjoint,
    residual_norm,
    unitarity_residual,
    extend_partial_isometry,
)
from src.components.cp_maps.kraus_maps import (
    KrausFamily,
    reduce_kraus,
    compose_cp,
    commute_residual,
    choi_matrix,
    generating_family,
)


FLIP_ORDERING = "lex-row-(i,j)-col-(k,l)"


class FlipUnitary(BaseModel):
    """
    Coefficients of T_i S_j = Σ_{k,l} u[(i,j),(k,l)] S_l T_k.

    Rows are indexed by i*m + j, columns by k*m + l.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: PositiveInt
    m: PositiveInt
    u: np.ndarray
    ordering: str = FLIP_ORDERING

    @model_validator(mode="after")
    def _check_shape(self):
        nm = self.n * self.m
        if self.u.shape != (nm, nm):
            raise InvalidFlip(
                f"flip unitary must be {nm} x {nm}, got {self.u.shape}",
                identity="flip_shape",
            )
        if self.ordering != FLIP_ORDERING:
            raise InvalidInput(f"unsupported flip ordering '{self.ordering}'", identity="flip_ordering")
        self.u.setflags(write=False)
        return self

    def flip_matrix(self) -> np.ndarray:
        """Matrix of t: E⊗F -> F⊗E, with t[l*n + k, i*m + j] = u[i*m + j, k*m + l]."""
        u4 = self.u.reshape(self.n, self.m, self.n, self.m)  # [i, j, k, l]
        return u4.transpose(3, 2, 0, 1).reshape(self.m * self.n, self.n * self.m)

    @classmethod
    def from_flip_matrix(cls, n: int, m: int, t: np.ndarray) -> "FlipUnitary":
        t = as_matrix(t, "t")
        if t.shape != (m * n, n * m):
            raise InvalidFlip(f"flip matrix must be {m * n} x {n * m}, got {t.shape}", identity="flip_shape")
        t4 = t.reshape(m, n, n, m)  # [l, k, i, j]
        u = np.ascontiguousarray(t4.transpose(2, 3, 1, 0).reshape(n * m, n * m))
        return cls(n=n, m=m, u=u)


def flip_relation_residual(u: np.ndarray, t_ops: Sequence[np.ndarray], s_ops: Sequence[np.ndarray]) -> float:
    """max_{i,j} ||T_i S_j - Σ u[(i,j),(k,l)] S_l T_k||_F."""
    n, m = len(t_ops), len(s_ops)
    if n == 0 or m == 0:
        return 0.0
    T = np.stack(t_ops)
    S = np.stack(s_ops)
    lhs = np.einsum("ipq,jqr->ijpr", T, S).reshape(n * m, *T.shape[1:])
    st = np.einsum("lpq,kqr->klpr", S, T).reshape(n * m, *T.shape[1:])
    rhs = np.einsum("ab,bpr->apr", u, st)
    return float(max(residual_norm(lhs[a] - rhs[a]) for a in range(n * m)))


def _generating_pair(theta: KrausFamily, phi: KrausFamily) -> Tuple[KrausFamily, KrausFamily]:
    # an empty family stands for the zero map, generated by the single operator 0
    return generating_family(theta), generating_family(phi)


def _check_commuting(theta: KrausFamily, phi: KrausFamily, tol: Tolerance):
    residual = commute_residual(theta, phi)
    scale = residual_norm(choi_matrix(compose_cp(theta, phi)).mat)
    if residual > tol.atol(scale):
        raise NotCommuting(
            "CP maps do not commute",
            context={"commute_residual": residual},
        )
    return residual


def coisometry_factor(
    theta: KrausFamily,
    phi: KrausFamily,
    direction: Literal["m", "n"],
    tol: Tolerance | None = None,
) -> Tuple[np.ndarray, int]:
    """
    Coefficients of the operator products in an orthonormal basis of E_ΘΦ.

    direction "m": column (i, j) holds the coordinates of T_i S_j.
    direction "n": column (l, k) holds the coordinates of S_l T_k.
    Both use the basis reduce_kraus(compose_cp(Θ, Φ)).
    """
    tol = tol or Tolerance.default()
    if direction not in ("m", "n"):
        raise InvalidInput(f"direction must be 'm' or 'n', got {direction!r}")
    theta, phi = _generating_pair(theta, phi)
    _check_commuting(theta, phi, tol)

    basis = reduce_kraus(compose_cp(theta, phi), tol)
    products = compose_cp(theta, phi) if direction == "m" else compose_cp(phi, theta)
    nm = products.n
    r = basis.n

    if r == 0:
        return np.zeros((0, nm), dtype=np.complex128), nm

    R = basis.vectorized()
    P = products.vectorized()
    C, *_ = spla.lstsq(R, P)

    fit = residual_norm(R @ C - P)
    if fit > tol.atol(residual_norm(P)):
        raise CoisometryCheckFailed(
            "operator products are not in the span of the composed family",
            identity="coisometry_span",
            context={"direction": direction, "fit_residual": fit},
        )

    cois = residual_norm(C @ adjoint(C) - np.eye(r))
    if cois > tol.atol(np.sqrt(r)):
        raise CoisometryCheckFailed(
            "coefficient matrix is not a coisometry",
            context={"direction": direction, "residual": cois},
        )

    rank = tol.rank(spla.svdvals(C))
    kernel_dim = nm - rank
    logger.info("Coisometry factor", direction=direction, rank=rank, kernel_dim=kernel_dim)
    return C, kernel_dim


def strong_commute_kernel_test(
    theta: KrausFamily, phi: KrausFamily, tol: Tolerance | None = None
) -> Tuple[int, int, bool]:
    _, ker_m = coisometry_factor(theta, phi, "m", tol)
    _, ker_n = coisometry_factor(theta, phi, "n", tol)
    return ker_m, ker_n, ker_m == ker_n


def partial_flip(theta: KrausFamily, phi: KrausFamily, tol: Tolerance | None = None) -> np.ndarray:
    """t0 = C_n* C_m: the partial isometry E⊗F -> F⊗E before any kernel extension."""
    c_m, _ = coisometry_factor(theta, phi, "m", tol)
    c_n, _ = coisometry_factor(theta, phi, "n", tol)
    return adjoint(c_n) @ c_m


def build_flip_unitary(theta: KrausFamily, phi: KrausFamily, tol: Tolerance | None = None) -> FlipUnitary:
    tol = tol or Tolerance.default()
    theta, phi = _generating_pair(theta, phi)
    c_m, ker_m = coisometry_factor(theta, phi, "m", tol)
    c_n, ker_n = coisometry_factor(theta, phi, "n", tol)
    if ker_m != ker_n:
        raise NotStronglyCommuting(
            "kernels of the multiplication coisometries differ",
            context={"dim_ker_m": ker_m, "dim_ker_n": ker_n},
        )

    t0 = adjoint(c_n) @ c_m
    t = extend_partial_isometry(t0, tol)
    flip = FlipUnitary.from_flip_matrix(theta.n, phi.n, t)

    unitarity = unitarity_residual(flip.u)
    if unitarity > tol.atol(np.sqrt(flip.u.shape[0])):
        raise ConstructionFailed("extended flip is not unitary", identity="flip_unitarity", context={"residual": unitarity})

    relation = flip_relation_residual(flip.u, theta.ops, phi.ops)
    if relation > tol.atol(1.0):
        raise ConstructionFailed(
            "flip does not reproduce the operator relation",
            identity="flip_relation",
            context={"residual": relation},
        )

    logger.info("Flip unitary built", n=theta.n, m=phi.n, relation_residual=relation, unitarity_residual=unitarity)
    return flip


def pad_families(
    theta: KrausFamily,
    phi: KrausFamily,
    t0,
    tol: Tolerance | None = None,
) -> Tuple[KrausFamily, KrausFamily, FlipUnitary]:
    """
    Enlarge E and F by zero Kraus operators so the flip always extends unitarily.

    E = E0 ⊕ F1 and F = E1 ⊕ F0, with E1, F1 formal copies of E0 = C^n, F0 = C^m.
    The flip on E⊗F is assembled blockwise from t = extend_partial_isometry(t0):

        E0⊗F0 -> F0⊗E0 : t            E0⊗F0 -> E1⊗F1 : I - t*t
        F1⊗E1 -> F0⊗E0 : I - tt*      F1⊗E1 -> E1⊗F1 : t*
        E0⊗E1 -> E1⊗E0 and F1⊗F0 -> F0⊗F1 : identity relabelings
    """
    tol = tol or Tolerance.default()
    theta, phi = _generating_pair(theta, phi)
    n, m = theta.n, phi.n
    N = n + m

    t0 = as_matrix(t0, "t0")
    if t0.shape != (m * n, n * m):
        raise InvalidInput(f"t0 must be {m * n} x {n * m}, got {t0.shape}", identity="flip_shape")
    t = extend_partial_isometry(t0, tol)

    def ef(x, y):
        return x * N + y

    def fe(y, x):
        return y * N + x

    c_e0f0 = np.array([ef(i, n + j) for i in range(n) for j in range(m)])
    c_f1e1 = np.array([ef(n + j, i) for j in range(m) for i in range(n)])
    r_f0e0 = np.array([fe(n + l, k) for l in range(m) for k in range(n)])
    r_e1f1 = np.array([fe(i, n + j) for i in range(n) for j in range(m)])

    eye = np.eye(n * m, dtype=np.complex128)
    s = np.zeros((N * N, N * N), dtype=np.complex128)
    s[np.ix_(r_f0e0, c_e0f0)] = t
    s[np.ix_(r_f0e0, c_f1e1)] = eye - t @ adjoint(t)
    s[np.ix_(r_e1f1, c_e0f0)] = eye - adjoint(t) @ t
    s[np.ix_(r_e1f1, c_f1e1)] = adjoint(t)
    for x in range(N):
        for y in range(N):
            if (x < n) == (y < n):
                s[ef(x, y), ef(x, y)] = 1.0

    zero = np.zeros((theta.d, theta.d), dtype=np.complex128)
    theta_pad = KrausFamily(d=theta.d, ops=list(theta.ops) + [zero] * m)
    phi_pad = KrausFamily(d=phi.d, ops=[zero] * n + list(phi.ops))
    flip = FlipUnitary.from_flip_matrix(N, N, s)

    unitarity = unitarity_residual(s)
    if unitarity > tol.atol(N):
        raise ConstructionFailed("padded flip is not unitary", identity="padded_flip_unitarity", context={"residual": unitarity})

    support = adjoint(t0) @ t0
    corner = residual_norm((s[np.ix_(r_f0e0, c_e0f0)] - t0) @ support)
    if corner > tol.atol(1.0):
        raise ConstructionFailed("padded flip moved the original partial isometry", identity="padded_flip_corner", context={"residual": corner})

    relation = flip_relation_residual(flip.u, theta_pad.ops, phi_pad.ops)
    if relation > tol.atol(1.0):
        raise ConstructionFailed("padded flip does not reproduce the relation", identity="flip_relation", context={"residual": relation})

    logger.info("Padded families", n=n, m=m, padded_size=N, relation_residual=relation)
    return theta_pad, phi_pad, flip

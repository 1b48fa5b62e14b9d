# src/components/dilation_engine/primitive_isometries.py

from __future__ import annotations
from typing import List, Tuple

import numpy as np

from src.common.logging.logger import logger
from src.common.exception.dilation_exceptions import NotPositive, NotContractive, ConstructionFailed, InvalidInput
from src.components.linalg_core.matrix_ops import Tolerance, adjoint, psd_sqrt, residual_norm
from src.components.product_system.product_system import CovariantRep, flip_mn, check_compatible
from src.components.dilation_engine.graded_space import GradedFockSpace


def _amplified_row(ops, copies: int) -> np.ndarray:
    """[I_c ⊗ X_1, ..., I_c ⊗ X_N] acting on E ⊗ C^c ⊗ H."""
    eye = np.eye(copies)
    return np.hstack([np.kron(eye, x) for x in ops])


def _defect(row: np.ndarray, side: str, tol: Tolerance) -> np.ndarray:
    try:
        return psd_sqrt(np.eye(row.shape[1]) - adjoint(row) @ row, tol)
    except NotPositive as e:
        raise NotContractive(f"{side} is not a row contraction; defect is not positive", e, identity="psd_defect")


def _embed_rows(words: int, c_from: int, c_to: int, d: int) -> np.ndarray:
    """Indices of (word, copy, h) for copy < c_from inside blocks laid out with c_to copies."""
    word, copy, h = np.meshgrid(np.arange(words), np.arange(c_from), np.arange(d), indexing="ij")
    return ((word * c_to + copy) * d + h).reshape(-1)


def _spread(space: GradedFockSpace, n_ops: int) -> List[np.ndarray]:
    return [np.zeros((space.dim, space.dim), dtype=np.complex128) for _ in range(n_ops)]


def build_primitive_isometries(
    rep: CovariantRep,
    space: GradedFockSpace,
    tol: Tolerance | None = None,
) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """
    Full matrices V2_i = V2(e_i ⊗ .) and U2_j = U2(f_j ⊗ .) on K.

    V2 is defined on grades (a, b) with a <= L-1:
        (0, b): (I ⊕ t_{1,b}^{-1} ⊗ I)(I_{F^b} ⊗ V0)(t_{1,b} ⊗ I), V0 = T̃ ⊕ Δ_T
        (a, b), a > 0: inclusion E ⊗ K(a, b) -> K(a+1, b)
    U2 mirrors this on grades with b <= L-1, starting from t_{a,1}^{-1} on (a, 0).
    Columns outside the domain are zero.
    """
    tol = tol or Tolerance.default()
    sys = space.sys
    check_compatible(sys, rep)
    if space.d_H != rep.h:
        raise InvalidInput("graded space was built for another H", identity="rep_shape")
    if space.L < 1:
        raise InvalidInput("primitive isometries need L >= 1", identity="depth")

    n, m, d, L = sys.n, sys.m, rep.h, space.L
    V2 = _spread(space, n)
    U2 = _spread(space, m)

    rows_T, rows_S, defect_T, defect_S = {}, {}, {}, {}
    for c in {space.multiplicity(0), space.multiplicity(1)}:
        rows_T[c] = _amplified_row(rep.T, c)
        rows_S[c] = _amplified_row(rep.S, c)
        defect_T[c] = _defect(rows_T[c], "T", tol)
        defect_S[c] = _defect(rows_S[c], "S", tol)

    # V2 on grades (0, b)
    for b in range(L + 1):
        c = space.multiplicity(b)
        fib = c * d
        tb = flip_mn(sys, 1, b)
        pre = np.kron(tb, np.eye(fib))
        top = np.kron(np.eye(m ** b), rows_T[c]) @ pre
        bottom = np.kron(adjoint(tb), np.eye(fib)) @ np.kron(np.eye(m ** b), defect_T[c]) @ pre

        src = space.block_slice(0, b)
        dst = space.block_slice(1, b)
        c_to = space.multiplicity(max(1, b))
        dst_rows = dst.start + _embed_rows(n * m ** b, c, c_to, d)
        blk = m ** b * fib
        for i in range(n):
            cols = slice(i * blk, (i + 1) * blk)
            V2[i][src, src] = top[:, cols]
            V2[i][np.ix_(dst_rows, np.arange(src.start, src.stop))] = bottom[:, cols]

    # V2 on grades (a, b), 1 <= a <= L-1
    for a in range(1, L):
        for b in range(L + 1):
            src = space.block_slice(a, b)
            dst = space.block_slice(a + 1, b)
            blk = src.stop - src.start
            for i in range(n):
                rows = slice(dst.start + i * blk, dst.start + (i + 1) * blk)
                V2[i][rows, src] = np.eye(blk)

    # U2 on grades (a, 0)
    for a in range(L + 1):
        c = space.multiplicity(a)
        fib = c * d
        ta = flip_mn(sys, a, 1)
        pre = np.kron(adjoint(ta), np.eye(fib))
        top = np.kron(np.eye(n ** a), rows_S[c]) @ pre
        bottom = np.kron(np.eye(n ** a), defect_S[c]) @ pre

        src = space.block_slice(a, 0)
        dst = space.block_slice(a, 1)
        c_to = space.multiplicity(max(a, 1))
        dst_rows = dst.start + _embed_rows(n ** a * m, c, c_to, d)
        blk = n ** a * fib
        for j in range(m):
            cols = slice(j * blk, (j + 1) * blk)
            U2[j][src, src] = top[:, cols]
            U2[j][np.ix_(dst_rows, np.arange(src.start, src.stop))] = bottom[:, cols]

    # U2 on grades (a, b), 1 <= b <= L-1
    for a in range(L + 1):
        for b in range(1, L):
            c = space.multiplicity(max(a, b))
            ta = flip_mn(sys, a, 1)
            P = np.kron(adjoint(ta), np.eye(m ** b * c * d))
            src = space.block_slice(a, b)
            dst = space.block_slice(a, b + 1)
            blk = src.stop - src.start
            for j in range(m):
                U2[j][dst, src] = P[:, j * blk:(j + 1) * blk]

    _check_isometries(space, V2, U2, tol)
    logger.info("Primitive isometries built", n=n, m=m, dim=space.dim, L=L)
    return V2, U2


def domain_mask(space: GradedFockSpace, side: str) -> np.ndarray:
    """Boolean mask of basis vectors in the domain of V2 (side 'V') or U2 (side 'U')."""
    mask = np.zeros(space.dim, dtype=bool)
    for a, b in space.grades:
        if (side == "V" and a <= space.L - 1) or (side == "U" and b <= space.L - 1):
            mask[space.block_slice(a, b)] = True
    return mask


def _check_isometries(space: GradedFockSpace, V2, U2, tol: Tolerance):
    for side, ops in (("V", V2), ("U", U2)):
        mask = domain_mask(space, side)
        stacked = np.hstack([op[:, mask] for op in ops])
        gram = adjoint(stacked) @ stacked
        res = residual_norm(gram - np.eye(gram.shape[0]))
        if res > tol.atol(np.sqrt(gram.shape[0])):
            raise ConstructionFailed(
                f"primitive {side}2 is not an isometry with orthogonal ranges",
                identity="primitive_isometry",
                context={"side": side, "residual": res},
            )

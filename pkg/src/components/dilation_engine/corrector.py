# src/components/dilation_engine/corrector.py

from __future__ import annotations
from typing import List, Tuple

import numpy as np
import scipy.linalg as spla
from pydantic import BaseModel, ConfigDict

from src.common.logging.logger import logger
from src.common.exception.dilation_exceptions import ConstructionFailed
from src.components.linalg_core.matrix_ops import (
    Tolerance,
    adjoint,
    residual_norm,
    unitarity_residual,
)
from src.components.dilation_engine.graded_space import GradedFockSpace


class Corrector(BaseModel):
    """Block-diagonal unitary W = ⊕_k W(k) along the levels of K."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    blocks: Tuple[np.ndarray, ...]
    wv_residuals: Tuple[float, ...]
    image_ranks: Tuple[int, ...]

    def matrix(self) -> np.ndarray:
        return spla.block_diag(*self.blocks).astype(np.complex128)

    def apply_left(self, space: GradedFockSpace, M: np.ndarray) -> np.ndarray:
        """W @ M without forming W."""
        out = np.empty_like(M)
        for level, block in enumerate(self.blocks):
            sl = space.level_slice(level)
            out[sl] = block @ M[sl]
        return out

    def apply_right_adjoint(self, space: GradedFockSpace, M: np.ndarray) -> np.ndarray:
        """M @ W* without forming W."""
        out = np.empty_like(M)
        for level, block in enumerate(self.blocks):
            sl = space.level_slice(level)
            out[:, sl] = M[:, sl] @ adjoint(block)
        return out


def _complement(basis: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the span of the (orthonormal) columns."""
    p, r = basis.shape
    if r == 0:
        return np.eye(p, dtype=np.complex128)
    q, _ = spla.qr(basis)
    return q[:, r:]


def build_corrector(
    space: GradedFockSpace,
    V2: List[np.ndarray],
    U2: List[np.ndarray],
    tol: Tolerance | None = None,
) -> Corrector:
    """
    Level unitaries W(k) with W(0) = I and, on E ⊗ F ⊗ K(k),

        W(k+1) V2_i U2_j W(k)* = Σ_{k',l} u[(i,j),(k',l)] U2_l V2_k'.

    Both sides are isometries landing in K(k+1) (plus K(0) when k = 0). With
    X = P Σ Q* on the level block, W(k+1)' = Y Q Σ^-1 P* is a partial isometry
    between the two images; the trailing left singular vectors of X are sent to
    the complement of its image in order, which gives W(k+1).
    """
    tol = tol or Tolerance.default()
    u = space.sys.u
    n, m = space.n, space.m

    blocks = [np.eye(space.level_dim(0), dtype=np.complex128)]
    wv_residuals: List[float] = []
    image_ranks: List[int] = []

    for k in range(space.L):
        cols = space.level_slice(k)
        rows = space.level_slice(k + 1)
        # one primitive step from level k stays in levels k and k+1; two steps stay below k+2
        mid = slice(space.level_offsets[k], space.window_end(k + 1))
        top = space.window_end(k + 2)
        wk_adj = adjoint(blocks[k])

        A = np.hstack([V2[i][:top, mid] @ (U2[j][mid, cols] @ wk_adj) for i in range(n) for j in range(m)])
        UV = [[U2[l][:top, mid] @ V2[kk][mid, cols] for l in range(m)] for kk in range(n)]
        B = np.hstack([
            sum(u[i * m + j, kk * m + l] * UV[kk][l] for kk in range(n) for l in range(m))
            for i in range(n) for j in range(m)
        ])

        outside = np.ones(top, dtype=bool)
        outside[rows] = False
        if k == 0:
            h = space.level_slice(0)
            outside[h] = False
            corner = residual_norm(A[h] - B[h])
            if corner > tol.atol(1.0):
                raise ConstructionFailed(
                    "primitive compositions disagree on H; the representation violates the flip relation",
                    identity="corner_commutation",
                    context={"residual": corner},
                )
        else:
            corner = 0.0

        leak = max(residual_norm(A[outside]), residual_norm(B[outside]))
        if leak > tol.atol(1.0):
            raise ConstructionFailed(
                "primitive compositions leave the next level",
                identity="grade_locality",
                context={"level": k, "residual": leak},
            )

        X, Y = A[rows], B[rows]
        P, s, Qh = spla.svd(X, full_matrices=True)
        rank = tol.rank(s)
        image_basis = (Y @ adjoint(Qh[:rank])) / s[:rank]

        w_partial = image_basis @ adjoint(P[:, :rank])
        image = residual_norm(w_partial @ X - Y)
        piso = residual_norm(adjoint(image_basis) @ image_basis - np.eye(rank))
        if max(image, piso) > tol.atol(np.sqrt(X.shape[0])):
            raise ConstructionFailed(
                "image-matching map is not a partial isometry",
                identity="corrector_image_isometry",
                context={"level": k + 1, "image_residual": image, "partial_isometry_residual": piso, "rank": rank},
            )

        w_next = w_partial + _complement(image_basis) @ adjoint(P[:, rank:])
        unit = unitarity_residual(w_next)
        if unit > tol.atol(np.sqrt(w_next.shape[0])):
            raise ConstructionFailed("corrector block is not unitary", identity="corrector_unitarity", context={"level": k + 1, "residual": unit})

        wv = float(np.hypot(residual_norm(w_next @ X - Y), corner))
        blocks.append(w_next)
        wv_residuals.append(wv)
        image_ranks.append(rank)
        logger.info("Corrector level built", level=k + 1, dim=w_next.shape[0], image_rank=rank, wv_residual=wv)

    return Corrector(blocks=tuple(blocks), wv_residuals=tuple(wv_residuals), image_ranks=tuple(image_ranks))

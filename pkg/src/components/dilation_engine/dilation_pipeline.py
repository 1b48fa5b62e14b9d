# src/components/dilation_engine/dilation_pipeline.py

from __future__ import annotations
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg as spla
from pydantic import BaseModel, ConfigDict

from src.common.logging.logger import logger
from src.common.exception.dilation_exceptions import ConstructionFailed, InvalidInput
from src.configuration.config_loader import config
from src.components.linalg_core.matrix_ops import Tolerance, adjoint, residual_norm
from src.components.product_system.product_system import CovariantRep, check_compatible
from src.components.dilation_engine.graded_space import GradedFockSpace
from src.components.dilation_engine.primitive_isometries import build_primitive_isometries
from src.components.dilation_engine.corrector import Corrector, build_corrector
from src.components.report_models import VerificationReport


class DilationResult(BaseModel):
    """
    Commuting isometric tuples V_i, U_j on the truncated space K.

    V_i and U_j are exact on grades <= valid_depth and zero above. A minimal
    restriction carries `basis`, the columns of its subspace inside K.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    space: GradedFockSpace
    V: Tuple[np.ndarray, ...]
    U: Tuple[np.ndarray, ...]
    W_embed: np.ndarray
    corrector: Corrector
    valid_depth: int
    basis: Optional[np.ndarray] = None
    invariance_residual: Optional[float] = None

    @property
    def dim(self) -> int:
        return self.W_embed.shape[0]

    @property
    def d_H(self) -> int:
        return self.W_embed.shape[1]

    @property
    def is_minimal(self) -> bool:
        return self.basis is not None


# --------------------------
# Assembly
# --------------------------

def assemble_from_parts(
    rep: CovariantRep,
    space: GradedFockSpace,
    V2: List[np.ndarray],
    U2: List[np.ndarray],
    corrector: Corrector,
    accept: float | None = None,
    check: bool = True,
) -> DilationResult:
    """V_i = W V2_i and U_j = U2_j W*, cut to grades <= L-1."""
    end = space.window_end(space.L - 1)
    V, U = [], []
    for v2 in V2:
        v = corrector.apply_left(space, v2)
        v[:, end:] = 0.0
        v.setflags(write=False)
        V.append(v)
    for u2 in U2:
        u = corrector.apply_right_adjoint(space, u2)
        u[:, end:] = 0.0
        u.setflags(write=False)
        U.append(u)

    embed = np.zeros((space.dim, space.d_H), dtype=np.complex128)
    embed[space.h_slice(), :] = np.eye(space.d_H)

    result = DilationResult(
        space=space,
        V=tuple(V),
        U=tuple(U),
        W_embed=embed,
        corrector=corrector,
        valid_depth=space.L - 1,
    )
    if check:
        report = _contract_report(result, rep, accept)
        worst = report.worst()
        if worst is not None:
            raise ConstructionFailed(
                f"dilation contract violated: {worst.name}",
                identity=worst.name,
                context={"residual": worst.max_residual, "window": worst.window},
            )
    return result


def assemble_dilation(
    rep: CovariantRep,
    space: GradedFockSpace,
    tol: Tolerance | None = None,
    accept: float | None = None,
) -> DilationResult:
    tol = tol or Tolerance.default()
    check_compatible(space.sys, rep)
    if space.L < 2:
        raise InvalidInput("a dilation needs truncation depth L >= 2", identity="depth")

    V2, U2 = build_primitive_isometries(rep, space, tol)
    corrector = build_corrector(space, V2, U2, tol)
    result = assemble_from_parts(rep, space, V2, U2, corrector, accept)
    logger.info("Dilation assembled", dim=space.dim, valid_depth=result.valid_depth, n=space.n, m=space.m)
    return result


# --------------------------
# Residuals
# --------------------------

def _word_label(letters: Tuple[Tuple[str, int], ...]) -> str:
    return " ".join(f"{side}{idx + 1}" for side, idx in letters)


def corner_words(result: DilationResult, rep: CovariantRep, depth: int) -> List[Dict[str, Any]]:
    """
    P_H w(V, U)|H next to w(T, S) for every word of length 1..depth.

    Words are built by multiplying new letters on the left, so the image of H
    never leaves the grades the letters are exact on.
    """
    big_ops = [("V", i, op) for i, op in enumerate(result.V)] + [("U", j, op) for j, op in enumerate(result.U)]
    small = {("V", i): op for i, op in enumerate(rep.T)}
    small.update({("U", j): op for j, op in enumerate(rep.S)})

    frontier = [((), result.W_embed, np.eye(rep.h, dtype=np.complex128))]
    entries = []
    for _ in range(depth):
        nxt = []
        for word, big, prod in frontier:
            for side, idx, op in big_ops:
                w = ((side, idx),) + word
                big_w = op @ big
                prod_w = small[(side, idx)] @ prod
                compressed = adjoint(result.W_embed) @ big_w
                entries.append({
                    "letters": w,
                    "word": _word_label(w),
                    "compressed": compressed,
                    "expected": prod_w,
                    "residual": residual_norm(compressed - prod_w),
                })
                nxt.append((w, big_w, prod_w))
        frontier = nxt
    return entries


def _stacked_isometry(ops, end: int) -> Tuple[float, float]:
    """(max isometry residual, max cross-range overlap) of the ops on the first `end` columns."""
    if end == 0 or not ops:
        return 0.0, 0.0
    stacked = np.hstack([op[:, :end] for op in ops])
    gram = adjoint(stacked) @ stacked
    iso, cross = 0.0, 0.0
    for a in range(len(ops)):
        for b in range(len(ops)):
            blk = gram[a * end:(a + 1) * end, b * end:(b + 1) * end]
            if a == b:
                iso = max(iso, residual_norm(blk - np.eye(end)))
            else:
                cross = max(cross, residual_norm(blk))
    return iso, cross


def commutation_window_residual(result: DilationResult, end: int) -> float:
    """max_{i,j} ||V_i U_j - Σ u[(i,j),(k,l)] U_l V_k|| on the first `end` columns."""
    u = result.space.sys.u
    n, m = len(result.V), len(result.U)
    if end == 0:
        return 0.0
    UV = [[result.U[l] @ result.V[k][:, :end] for l in range(m)] for k in range(n)]
    worst = 0.0
    for i in range(n):
        for j in range(m):
            lhs = result.V[i] @ result.U[j][:, :end]
            rhs = sum(u[i * m + j, k * m + l] * UV[k][l] for k in range(n) for l in range(m))
            worst = max(worst, residual_norm(lhs - rhs))
    return worst


def _invariance(result: DilationResult, end: int) -> float:
    d = result.d_H
    ops = list(result.V) + list(result.U)
    return max((residual_norm(op[:d, d:end]) for op in ops), default=0.0)


def _contract_report(result: DilationResult, rep: CovariantRep, accept: float | None) -> VerificationReport:
    accept = accept or config.get_tolerance().accept
    space = result.space
    valid = result.valid_depth
    end = space.window_end(valid)
    end_comm = space.window_end(valid - 1)
    window = f"grades<={valid}"

    report = VerificationReport(accept=accept, depth=1)
    corners = corner_words(result, rep, 1)
    report.add("corner_words", max(e["residual"] for e in corners), "words<=1", accept)
    iso_v, cross_v = _stacked_isometry(result.V, end)
    iso_u, cross_u = _stacked_isometry(result.U, end)
    report.add("isometry", max(iso_v, iso_u), window, accept)
    report.add("range_orthogonality", max(cross_v, cross_u), window, accept)
    report.add("commutation", commutation_window_residual(result, end_comm), f"grades<={valid - 1}", accept)
    report.add("k_minus_h_invariance", _invariance(result, end), window, accept)
    return report


def verify_dilation(
    result: DilationResult,
    rep: CovariantRep,
    depth: int | None = None,
    accept: float | None = None,
) -> VerificationReport:
    """
    Per-identity residuals of the assembled dilation.

    Corner words run to `depth`; isometry, range orthogonality and K⊖H
    invariance use grades <= valid_depth; commutation uses grades <= valid_depth - 1.
    """
    accept = accept or config.get_tolerance().accept
    valid = result.valid_depth
    depth = max(valid - 1, 1) if depth is None else depth
    if depth < 1 or depth > max(valid - 1, 1):
        raise InvalidInput(
            f"verification depth must lie in [1, {max(valid - 1, 1)}], got {depth}",
            identity="depth",
        )

    report = VerificationReport(accept=accept, depth=depth)
    corners = corner_words(result, rep, depth)
    report.add("corner_words", max(e["residual"] for e in corners), f"words<={depth}", accept)

    if result.is_minimal:
        report.add("subspace_invariance", result.invariance_residual or 0.0, f"words<={valid - 1}", accept)
    else:
        space = result.space
        end = space.window_end(valid)
        iso_v, cross_v = _stacked_isometry(result.V, end)
        iso_u, cross_u = _stacked_isometry(result.U, end)
        report.add("isometry", max(iso_v, iso_u), f"grades<={valid}", accept)
        report.add("range_orthogonality", max(cross_v, cross_u), f"grades<={valid}", accept)
        report.add("commutation", commutation_window_residual(result, space.window_end(valid - 1)), f"grades<={valid - 1}", accept)
        report.add("k_minus_h_invariance", _invariance(result, end), f"grades<={valid}", accept)

    log = logger.info if report.verdict == "pass" else logger.warning
    log("Dilation verified", verdict=report.verdict, depth=depth, failed=report.failed())
    return report


# --------------------------
# Minimal restriction
# --------------------------

def _new_directions(vectors: np.ndarray, scale: float, tol: Tolerance) -> np.ndarray:
    if vectors.size == 0:
        return np.zeros((vectors.shape[0], 0), dtype=np.complex128)
    u, s, _ = spla.svd(vectors, full_matrices=False, lapack_driver="gesvd")
    keep = int(np.count_nonzero(s > tol.atol(scale)))
    return u[:, :keep]


def minimal_restriction(
    result: DilationResult,
    rep: CovariantRep,
    tol: Tolerance | None = None,
) -> DilationResult:
    """Restrict V, U to the span of all words of length <= valid_depth applied to H."""
    tol = tol or Tolerance.default()
    ops = list(result.V) + list(result.U)
    layers = [result.W_embed]
    basis = result.W_embed
    closed = False

    for _ in range(result.valid_depth):
        images = np.hstack([op @ layers[-1] for op in ops])
        residual = images - basis @ (adjoint(basis) @ images)
        new = _new_directions(residual, residual_norm(images), tol)
        if new.shape[1] == 0:
            closed = True
            break
        new = new - basis @ (adjoint(basis) @ new)
        new, _ = np.linalg.qr(new)
        layers.append(new)
        basis = np.hstack([basis, new])

    # the last layer's images may leave the span once the word budget is spent
    inner = basis if closed or len(layers) == 1 else np.hstack(layers[:-1])
    images = np.hstack([op @ inner for op in ops])
    invariance = residual_norm(images - basis @ (adjoint(basis) @ images))

    V = tuple(adjoint(basis) @ op @ basis for op in result.V)
    U = tuple(adjoint(basis) @ op @ basis for op in result.U)
    logger.info("Minimal restriction", ambient_dim=result.dim, minimal_dim=basis.shape[1], invariance_residual=invariance)
    return DilationResult(
        space=result.space,
        V=V,
        U=U,
        W_embed=adjoint(basis) @ result.W_embed,
        corrector=result.corrector,
        valid_depth=result.valid_depth,
        basis=basis,
        invariance_residual=invariance,
    )


# --------------------------
# Tables and summaries
# --------------------------

def word_table(result: DilationResult, rep: CovariantRep, depth: int | None = None) -> List[Dict[str, Any]]:
    """
    Corner words up to `depth` (default valid_depth).

    For n = m = 1 each ordered word V^a U^b also carries its exponents (a, b).
    """
    depth = result.valid_depth if depth is None else depth
    if depth < 1 or depth > result.valid_depth + 1:
        raise InvalidInput(f"word table depth must lie in [1, {result.valid_depth + 1}], got {depth}", identity="depth")

    scalar_pair = len(result.V) == 1 and len(result.U) == 1
    rows = []
    for entry in sorted(corner_words(result, rep, depth), key=lambda e: (len(e["letters"]), e["word"])):
        row = {k: entry[k] for k in ("word", "compressed", "expected", "residual")}
        if scalar_pair:
            sides = "".join(side for side, _ in entry["letters"])
            if sides == "V" * sides.count("V") + "U" * sides.count("U"):
                row["a"], row["b"] = sides.count("V"), sides.count("U")
        rows.append(row)
    return rows


def dilation_summary(result: DilationResult, minimal: DilationResult | None = None) -> Dict[str, Any]:
    space = result.space
    return {
        "dim": space.dim,
        "L": space.L,
        "level_dims": [space.level_dim(k) for k in range(space.L + 1)],
        "valid_depth": result.valid_depth,
        "mu": space.mu,
        "image_ranks": list(result.corrector.image_ranks),
        "wv_residuals": list(result.corrector.wv_residuals),
        "minimal_dim": None if minimal is None else minimal.dim,
    }

# src/components/endo_dilation/endomorphisms.py

from __future__ import annotations
from typing import Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.common.logging.logger import logger
from src.common.exception.dilation_exceptions import InvalidInput
from src.configuration.config_loader import config
from src.components.linalg_core.matrix_ops import adjoint, residual_norm, as_matrix
from src.components.cp_maps.kraus_maps import KrausFamily, apply_cp, matrix_unit
from src.components.dilation_engine.dilation_pipeline import DilationResult
from src.components.report_models import VerificationReport


CONVENTION_NOTE = "alpha dilates theta (the T side, built from V); beta dilates phi (the S side, built from U)"

Side = Literal["alpha", "beta"]


class EndoPair(BaseModel):
    """α(b) = Σ_i V_i b V_i*, β(b) = Σ_j U_j b U_j* on matrices over the truncated space."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    result: DilationResult
    valid_depth: int
    unit_idempotence_residual: float = 0.0

    def ops(self, side: Side) -> Tuple[np.ndarray, ...]:
        return self.result.V if side == "alpha" else self.result.U

    def apply(self, side: Side, b) -> np.ndarray:
        b = as_matrix(b, "b")
        if b.shape != (self.result.dim, self.result.dim):
            raise InvalidInput(f"operator must be {self.result.dim} x {self.result.dim}, got {b.shape}", identity="dimension_match")
        return sum(op @ b @ adjoint(op) for op in self.ops(side))

    def alpha(self, b) -> np.ndarray:
        return self.apply("alpha", b)

    def beta(self, b) -> np.ndarray:
        return self.apply("beta", b)

    def unit_image(self, side: Side, cols: slice | None = None) -> np.ndarray:
        """Columns of α(I) (or β(I))."""
        cols = cols if cols is not None else slice(0, self.result.dim)
        return sum(op @ adjoint(op[cols, :]) for op in self.ops(side))


def _window(pair: EndoPair, depth: int) -> slice:
    return slice(0, pair.result.space.window_end(depth))


def _idempotence(pair: EndoPair, side: Side, depth: int) -> float:
    win = _window(pair, depth)
    first = pair.unit_image(side, win)                    # α(I) P_D
    second = sum(op @ (adjoint(op) @ first) for op in pair.ops(side))
    return residual_norm(second[win] - first[win])


def lift_endomorphisms(result: DilationResult) -> EndoPair:
    if result.is_minimal:
        raise InvalidInput("endomorphisms are lifted from the full truncated dilation", identity="minimal_result")
    depth = max(result.valid_depth - 1, 0)
    draft = EndoPair(result=result, valid_depth=result.valid_depth)
    idem = max(_idempotence(draft, "alpha", depth), _idempotence(draft, "beta", depth))
    logger.info("Endomorphisms lifted", dim=result.dim, valid_depth=result.valid_depth, unit_idempotence_residual=idem)
    return EndoPair(result=result, valid_depth=result.valid_depth, unit_idempotence_residual=idem)


# --------------------------
# Residuals
# --------------------------

def corner_recovery_residual(pair: EndoPair, side: Side, cp_map: KrausFamily) -> float:
    """max over matrix units of ||Θ(a) - W* α(W a W*) W||."""
    d = pair.result.d_H
    if cp_map.d != d:
        raise InvalidInput("CP map acts on a different H", identity="dimension_match")
    h = slice(0, d)
    corners = [op[h, h] for op in pair.ops(side)]
    worst = 0.0
    for p in range(d):
        for q in range(d):
            a = matrix_unit(d, p, q)
            lifted = sum(c @ a @ adjoint(c) for c in corners)
            worst = max(worst, residual_norm(apply_cp(cp_map, a) - lifted))
    return worst


def coinvariance_residual(pair: EndoPair, side: Side) -> float:
    """||α(WW*) WW* - α(I) WW*||; H is co-invariant when P_H V_i restricted to K⊖H vanishes."""
    d = pair.result.d_H
    total = np.zeros((pair.result.dim, d), dtype=np.complex128)
    for op in pair.ops(side):
        inner = -adjoint(op[:d, :])
        inner[:d, :] += adjoint(op[:d, :d])
        total += op @ inner
    return residual_norm(total)


def _random_windowed(rng: np.random.Generator, size: int) -> np.ndarray:
    b = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return b / np.linalg.norm(b)


def multiplicativity_window_residual(pair: EndoPair, side: Side, depth: int, samples: int, seed: int) -> float:
    """
    max ||α(b1 b2) - α(b1) α(b2)|| over random b supported on grades <= depth.

    With Y = [V_1 P_D, ..., V_n P_D] and G = Y*Y the difference is Y Δ Y*, where
    Δ = B1 G B2 - B12 and B = I_n ⊗ b, so its norm is sqrt(tr(Δ G Δ* G)).
    """
    win = _window(pair, depth)
    size = win.stop
    ops = pair.ops(side)
    Y = np.hstack([op[:, win] for op in ops])
    G = adjoint(Y) @ Y
    rng = np.random.default_rng(seed)
    eye = np.eye(len(ops))
    worst = 0.0
    for _ in range(samples):
        b1 = _random_windowed(rng, size)
        b2 = _random_windowed(rng, size)
        delta = np.kron(eye, b1) @ G @ np.kron(eye, b2) - np.kron(eye, b1 @ b2)
        value = np.real(np.trace(delta @ G @ adjoint(delta) @ G))
        worst = max(worst, float(np.sqrt(max(value, 0.0))))
    return worst


def commutation_window_residual(pair: EndoPair, depth: int, samples: int, seed: int) -> float:
    """max ||P_D (αβ(b) - βα(b)) P_D|| over random b supported on grades <= depth."""
    win = _window(pair, depth)
    V, U = pair.result.V, pair.result.U
    vu = [(v @ u[:, win])[win] for v in V for u in U]
    uv = [(u @ v[:, win])[win] for u in U for v in V]
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        b = _random_windowed(rng, win.stop)
        lhs = sum(x @ b @ adjoint(x) for x in vu)
        rhs = sum(x @ b @ adjoint(x) for x in uv)
        worst = max(worst, residual_norm(lhs - rhs))
    return worst


def verify_endomorphic_dilation(
    pair: EndoPair,
    theta: KrausFamily,
    phi: KrausFamily,
    depth: int | None = None,
    samples: int | None = None,
    seed: int | None = None,
    accept: float | None = None,
    exact: float | None = None,
) -> VerificationReport:
    tolerances = config.get_tolerance()
    endo_cfg = config.get_endo_config()
    accept = accept or tolerances.accept
    exact = exact or tolerances.exact
    samples = samples or endo_cfg.random_samples
    seed = endo_cfg.seed if seed is None else seed
    depth = pair.valid_depth - 1 if depth is None else depth
    if depth < 0 or depth > pair.valid_depth - 1:
        raise InvalidInput(f"endomorphism depth must lie in [0, {pair.valid_depth - 1}], got {depth}", identity="depth")

    window = f"grades<={depth}"
    report = VerificationReport(accept=accept, depth=depth, note=CONVENTION_NOTE)
    report.add("corner_recovery_alpha", corner_recovery_residual(pair, "alpha", theta), "grades<=1", exact)
    report.add("corner_recovery_beta", corner_recovery_residual(pair, "beta", phi), "grades<=1", exact)
    report.add("coinvariance_alpha", coinvariance_residual(pair, "alpha"), f"grades<={pair.valid_depth}", accept)
    report.add("coinvariance_beta", coinvariance_residual(pair, "beta"), f"grades<={pair.valid_depth}", accept)
    report.add("multiplicativity_alpha", multiplicativity_window_residual(pair, "alpha", depth, samples, seed), window, accept)
    report.add("multiplicativity_beta", multiplicativity_window_residual(pair, "beta", depth, samples, seed + 1), window, accept)
    report.add("commutation_alpha_beta", commutation_window_residual(pair, depth, samples, seed + 2), window, accept)
    report.add("unit_idempotence", pair.unit_idempotence_residual, f"grades<={pair.valid_depth - 1}", accept)

    log = logger.info if report.verdict == "pass" else logger.warning
    log("Endomorphic dilation verified", verdict=report.verdict, depth=depth, failed=report.failed())
    return report

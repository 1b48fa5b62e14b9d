# src/components/endo_dilation/roundtrip.py

from __future__ import annotations
from typing import Literal, Optional

import numpy as np
import scipy.linalg as spla
from pydantic import BaseModel, ConfigDict

from src.common.logging.logger import logger
from src.common.exception.dilation_exceptions import ConstructionFailed
from src.configuration.config_loader import config
from src.components.linalg_core.matrix_ops import Tolerance, residual_norm, unitarity_residual
from src.components.cp_maps.kraus_maps import KrausFamily, reduce_kraus
from src.components.cp_maps.flip_construction import build_flip_unitary, flip_relation_residual, FlipUnitary
from src.components.cp_maps.tensor_spaces import intertwiner_space
from src.components.product_system.product_system import (
    ScalarProductSystem,
    CovariantRep,
    check_compatible,
    induced_cp_pair,
)


class RoundtripReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    status: Literal["ok", "index_drop"]
    kraus_counts: tuple[int, int]
    reduced_counts: tuple[int, int]
    intertwiner_dims: tuple[int, int]
    index_equal: bool
    rebuilt_u: np.ndarray
    rebuilt_relation_residual: float
    verdict: Literal["pass", "fail"]
    accept: float
    original_relation_residual: Optional[float] = None
    flip_distance: Optional[float] = None
    w_E_unitarity: Optional[float] = None
    w_F_unitarity: Optional[float] = None
    w_fit_residual: Optional[float] = None
    compatibility_residual: Optional[float] = None


def _coefficients(family: KrausFamily, rep_family: KrausFamily) -> tuple[np.ndarray, float]:
    """w with T_Θ(X_b) = Σ_i w[i, b] T_i, plus the fit residual."""
    A = family.vectorized()
    B = rep_family.vectorized()
    w, *_ = spla.lstsq(A, B)
    return w, residual_norm(A @ w - B)


def roundtrip_metric_spaces(
    sys: ScalarProductSystem,
    rep: CovariantRep,
    tol: Tolerance | None = None,
    accept: float | None = None,
) -> RoundtripReport:
    """
    Rebuild the product system from the CP maps the representation induces.

    Rank-deficient T or S families are reported as an index drop and the
    reduced families are used from there on.
    """
    tol = tol or Tolerance.default()
    accept = accept or config.get_tolerance().accept
    check_compatible(sys, rep)

    theta, phi = induced_cp_pair(rep)
    theta_red, phi_red = reduce_kraus(theta, tol), reduce_kraus(phi, tol)
    status = "ok" if (theta_red.n, phi_red.n) == (theta.n, phi.n) else "index_drop"
    if status == "index_drop":
        logger.warning(
            "Representation families are not independent; continuing with reduced families",
            kraus_counts=[theta.n, phi.n],
            reduced_counts=[theta_red.n, phi_red.n],
        )
    theta_used, phi_used = (theta, phi) if status == "ok" else (theta_red, phi_red)

    space_t = intertwiner_space(theta_used, tol)
    space_s = intertwiner_space(phi_used, tol)
    dims = (space_t.dim, space_s.dim)
    index_equal = dims == (theta_red.n, phi_red.n)
    if not index_equal:
        raise ConstructionFailed(
            "intertwiner dimensions differ from the Kraus ranks",
            identity="index_equality",
            context={"dims": list(dims), "reduced_counts": [theta_red.n, phi_red.n]},
        )

    rebuilt = build_flip_unitary(theta_used, phi_used, tol)
    rebuilt_residual = flip_relation_residual(rebuilt.u, theta_used.ops, phi_used.ops)

    report = RoundtripReport(
        status=status,
        kraus_counts=(theta.n, phi.n),
        reduced_counts=(theta_red.n, phi_red.n),
        intertwiner_dims=dims,
        index_equal=index_equal,
        rebuilt_u=rebuilt.u,
        rebuilt_relation_residual=rebuilt_residual,
        verdict="pass" if rebuilt_residual <= accept else "fail",
        accept=accept,
    )

    if status == "ok":
        w_E, fit_E = _coefficients(theta, space_t.t_rep)
        w_F, fit_F = _coefficients(phi, space_s.t_rep)
        rep_flip: FlipUnitary = build_flip_unitary(space_t.t_rep, space_s.t_rep, tol)
        t = sys.t
        compat = residual_norm(t @ np.kron(w_E, w_F) - np.kron(w_F, w_E) @ rep_flip.flip_matrix())
        report.original_relation_residual = flip_relation_residual(sys.u, rep.T, rep.S)
        report.flip_distance = residual_norm(sys.u - rebuilt.u)
        report.w_E_unitarity = unitarity_residual(w_E)
        report.w_F_unitarity = unitarity_residual(w_F)
        report.w_fit_residual = max(fit_E, fit_F)
        report.compatibility_residual = compat

    logger.info(
        "Round trip finished",
        status=status,
        intertwiner_dims=list(dims),
        rebuilt_relation_residual=rebuilt_residual,
        flip_distance=report.flip_distance,
    )
    return report

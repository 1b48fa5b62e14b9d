# src/components/dilation_workflow/dilation_workflow_pipeline.py

from __future__ import annotations
from typing import Any, Dict, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from src.common.logging.logger import logger
from src.common.exception.dilation_exceptions import NotCommuting, NotStronglyCommuting
from src.configuration.config_loader import config
from src.components.linalg_core.matrix_ops import Tolerance, residual_norm, unitarity_residual
from src.components.cp_maps.kraus_maps import (
    KrausFamily,
    generating_family,
    reduce_kraus,
    commute_residual,
    compose_cp,
    choi_matrix,
)
from src.components.cp_maps.flip_construction import (
    FlipUnitary,
    build_flip_unitary,
    coisometry_factor,
    flip_relation_residual,
    pad_families,
    partial_flip,
    strong_commute_kernel_test,
)
from src.components.cp_maps.tensor_spaces import strong_commute_direct
from src.components.product_system.product_system import (
    ScalarProductSystem,
    CovariantRep,
    make_system,
    commutation_residual,
)
from src.components.dilation_engine.graded_space import build_graded_space
from src.components.dilation_engine.dilation_pipeline import (
    DilationResult,
    assemble_dilation,
    verify_dilation,
    minimal_restriction,
    word_table,
    dilation_summary,
)
from src.components.endo_dilation.endomorphisms import (
    CONVENTION_NOTE,
    lift_endomorphisms,
    verify_endomorphic_dilation,
)
from src.components.endo_dilation.roundtrip import roundtrip_metric_spaces
from src.components.report_models import VerificationReport
from src.utils.matrix_codec import encode_matrix, encode_matrices, encode_flip


class WorkflowSettings(BaseModel):
    """Per-run overrides of the configuration file."""

    model_config = ConfigDict(frozen=True)

    rank_eps: float
    accept: float
    depth: int
    mu: int
    seed: int
    pad: bool = False

    @classmethod
    def from_config(cls, **overrides) -> "WorkflowSettings":
        tolerances = config.get_tolerance()
        dilation_cfg = config.get_dilation_config()
        values = {
            "rank_eps": tolerances.rank_eps,
            "accept": tolerances.accept,
            "depth": dilation_cfg.default_depth,
            "mu": dilation_cfg.mu,
            "seed": config.get_endo_config().seed,
            "pad": dilation_cfg.pad_mode == "always",
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def identity_table(report: Dict[str, Any]) -> pd.DataFrame:
    """Console view of the per-identity residuals collected in a report."""
    rows = []
    for section, body in report.items():
        if isinstance(body, dict) and "identities" in body:
            for item in body["identities"]:
                rows.append({"section": section, **item})
    if not rows:
        return pd.DataFrame(columns=["section", "name", "max_residual", "window", "threshold"])
    frame = pd.DataFrame(rows)
    residuals = pd.to_numeric(frame["max_residual"], errors="coerce")
    frame["status"] = np.where(residuals <= frame["threshold"], "ok", "FAIL")
    return frame


def _verification_dict(report: VerificationReport) -> Dict[str, Any]:
    return report.model_dump(exclude_none=True)


class DilationWorkflow:
    """Chains the constructions behind every CLI command and shapes their reports."""

    def __init__(self, settings: WorkflowSettings | None = None):
        self.settings = settings or WorkflowSettings.from_config()
        self.tol = Tolerance(eps=self.settings.rank_eps)
        self.export_cfg = config.get_export_config()
        self._last: Optional[Tuple[KrausFamily, KrausFamily, DilationResult]] = None
        logger.info("DilationWorkflow initialized", **self.settings.model_dump())

    # --------------------------
    # Report scaffolding
    # --------------------------
    def header(self, command: str, path: str | None = None) -> Dict[str, Any]:
        head: Dict[str, Any] = {
            "command": command,
            "tolerances": {"rank_eps": self.settings.rank_eps, "accept": self.settings.accept},
        }
        if command == "endo":
            head["convention"] = CONVENTION_NOTE
        if path is not None:
            head["path"] = path
        return head

    def _reduce(self, theta: KrausFamily, phi: KrausFamily) -> Tuple[KrausFamily, KrausFamily]:
        # the zero map reduces to the empty family; it enters the product system as {0}
        return generating_family(reduce_kraus(theta, self.tol)), generating_family(reduce_kraus(phi, self.tol))

    def _require_commuting(self, theta: KrausFamily, phi: KrausFamily) -> float:
        residual = commute_residual(theta, phi)
        scale = residual_norm(choi_matrix(compose_cp(theta, phi)).mat)
        if residual > self.tol.atol(scale):
            raise NotCommuting("CP maps do not commute", context={"commute_residual": residual})
        return residual

    # --------------------------
    # Commands on CP pairs
    # --------------------------
    def check_commute(self, theta: KrausFamily, phi: KrausFamily) -> Dict[str, Any]:
        residual = commute_residual(theta, phi)
        scale = residual_norm(choi_matrix(compose_cp(theta, phi)).mat)
        verdict = "pass" if residual <= self.tol.atol(scale) else "fail"
        report = self.header("check-commute")
        report.update({"d": theta.d, "commute_residual": residual, "verdict": verdict})
        if verdict == "fail":
            report["failed_identity"] = "cp_commutation"
        return report

    def strong_commute(self, theta: KrausFamily, phi: KrausFamily) -> Dict[str, Any]:
        theta, phi = self._reduce(theta, phi)
        ker_m, ker_n, kernel_verdict = strong_commute_kernel_test(theta, phi, self.tol)
        direct = strong_commute_direct(theta, phi, self.tol)
        agree = kernel_verdict == direct.verdict
        report = self.header("strong-commute")
        report.update({
            "sizes": [theta.n, phi.n],
            "dim_ker_m": ker_m,
            "dim_ker_n": ker_n,
            "kernel_verdict": kernel_verdict,
            "direct_verdict": direct.verdict,
            "isometry_residual": direct.isometry_residual,
            "gram_ranks": list(direct.gram_ranks),
            "submodule_ranks": list(direct.submodule_ranks),
            "complement_dims": list(direct.complement_dims),
            "oracles_agree": agree,
            "verdict": "pass" if kernel_verdict and direct.verdict and agree else "fail",
        })
        if report["verdict"] == "fail":
            report["failed_identity"] = "kernel_dimensions" if not kernel_verdict else "strong_commutation_oracles"
        return report

    def _product_system(
        self, theta: KrausFamily, phi: KrausFamily
    ) -> Tuple[KrausFamily, KrausFamily, FlipUnitary, str]:
        """Flip for the reduced pair; falls back to the padded families when the flip does not extend."""
        if self.settings.pad:
            t0 = partial_flip(theta, phi, self.tol)
            theta_p, phi_p, flip = pad_families(theta, phi, t0, self.tol)
            return theta_p, phi_p, flip, "padded"
        try:
            return theta, phi, build_flip_unitary(theta, phi, self.tol), "direct"
        except NotStronglyCommuting:
            logger.warning("Flip does not extend in place; switching to padded families")
            t0 = partial_flip(theta, phi, self.tol)
            theta_p, phi_p, flip = pad_families(theta, phi, t0, self.tol)
            return theta_p, phi_p, flip, "padded"

    def flip(self, theta: KrausFamily, phi: KrausFamily) -> Dict[str, Any]:
        theta, phi = self._reduce(theta, phi)
        self._require_commuting(theta, phi)
        _, ker_m = coisometry_factor(theta, phi, "m", self.tol)
        _, ker_n = coisometry_factor(theta, phi, "n", self.tol)
        theta_u, phi_u, flip, path = self._product_system(theta, phi)
        report = self.header("flip", path)
        report.update({
            "sizes": [theta.n, phi.n],
            "dim_ker_m": ker_m,
            "dim_ker_n": ker_n,
            "flip": encode_flip(flip),
            "relation_residual": flip_relation_residual(flip.u, theta_u.ops, phi_u.ops),
            "unitarity_residual": unitarity_residual(flip.u),
            "verdict": "pass",
        })
        return report

    def build_dilation(
        self, sys: ScalarProductSystem, rep: CovariantRep
    ) -> Tuple[DilationResult, VerificationReport]:
        space = build_graded_space(sys, rep.h, self.settings.depth, self.settings.mu)
        result = assemble_dilation(rep, space, self.tol, self.settings.accept)
        report = verify_dilation(result, rep, accept=self.settings.accept)
        return result, report

    def _dilation_body(self, sys: ScalarProductSystem, rep: CovariantRep, result: DilationResult,
                       verification: VerificationReport) -> Dict[str, Any]:
        minimal = minimal_restriction(result, rep, self.tol)
        body: Dict[str, Any] = {
            "system": {"n": sys.n, "m": sys.m, "u": encode_matrix(sys.u)},
            "relation_residual": commutation_residual(sys, rep, 1, 1),
            "summary": dilation_summary(result, minimal),
            "verification": _verification_dict(verification),
            "minimal_verification": _verification_dict(
                verify_dilation(minimal, rep, accept=self.settings.accept)
            ),
        }
        if self.export_cfg.word_table:
            body["word_table"] = [
                {**{k: v for k, v in row.items() if k not in ("compressed", "expected")},
                 "compressed": encode_matrix(row["compressed"]),
                 "expected": encode_matrix(row["expected"])}
                for row in word_table(result, rep)
            ]
        if result.dim <= self.export_cfg.max_matrix_dimension:
            body["matrices"] = {
                "V": encode_matrices(result.V),
                "U": encode_matrices(result.U),
                "W": encode_matrices(result.corrector.blocks),
            }
        return body

    def dilate(self, theta: KrausFamily, phi: KrausFamily) -> Dict[str, Any]:
        theta, phi = self._reduce(theta, phi)
        self._require_commuting(theta, phi)
        theta_u, phi_u, flip, path = self._product_system(theta, phi)
        sys = make_system(flip.n, flip.m, flip.u, self.tol)
        rep = CovariantRep(h=theta.d, T=list(theta_u.ops), S=list(phi_u.ops))
        result, verification = self.build_dilation(sys, rep)

        report = self.header("dilate", path)
        report.update(self._dilation_body(sys, rep, result, verification))
        report["verdict"] = verification.verdict
        if verification.verdict == "fail":
            report["failed_identity"] = verification.worst().name
        self._last = (theta_u, phi_u, result)
        return report

    def endo(self, theta: KrausFamily, phi: KrausFamily) -> Dict[str, Any]:
        report = self.dilate(theta, phi)
        report["command"] = "endo"
        report["convention"] = CONVENTION_NOTE
        theta_u, phi_u, result = self._last
        pair = lift_endomorphisms(result)
        endo_report = verify_endomorphic_dilation(
            pair, theta_u, phi_u, seed=self.settings.seed, accept=self.settings.accept
        )
        report["endomorphisms"] = _verification_dict(endo_report)
        report.pop("matrices", None)
        verdicts = [report["verdict"], endo_report.verdict]
        report["verdict"] = "pass" if all(v == "pass" for v in verdicts) else "fail"
        if report["verdict"] == "fail" and "failed_identity" not in report:
            report["failed_identity"] = endo_report.worst().name
        return report

    # --------------------------
    # Commands on representations
    # --------------------------
    def verify(self, sys: ScalarProductSystem, rep: CovariantRep) -> Dict[str, Any]:
        result, verification = self.build_dilation(sys, rep)
        report = self.header("verify")
        report.update(self._dilation_body(sys, rep, result, verification))
        report.pop("matrices", None)
        report["verdict"] = verification.verdict
        if verification.verdict == "fail":
            report["failed_identity"] = verification.worst().name
        return report

    def roundtrip(self, sys: ScalarProductSystem, rep: CovariantRep) -> Dict[str, Any]:
        rt = roundtrip_metric_spaces(sys, rep, self.tol, self.settings.accept)
        report = self.header("roundtrip")
        body = rt.model_dump(exclude_none=True)
        body["rebuilt_u"] = encode_matrix(rt.rebuilt_u)
        body["kraus_counts"] = list(rt.kraus_counts)
        body["reduced_counts"] = list(rt.reduced_counts)
        body["intertwiner_dims"] = list(rt.intertwiner_dims)
        report.update(body)
        if rt.verdict == "fail":
            report["failed_identity"] = "flip_relation"
        return report

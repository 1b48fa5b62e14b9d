# main_dilation.py


import argparse
import sys
from typing import Any, Callable, Dict, List, Literal, Optional

import jsonschema
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.components.dilation_workflow.dilation_workflow_pipeline import (
    DilationWorkflow,
    WorkflowSettings,
    identity_table,
)
from src.common.logging.logger import CustomLogger, logger
from src.common.exception.custom_exception import CustomException
from src.common.exception.dilation_exceptions import INPUT_ERRORS
from src.utils.common_utils import to_builtin
from src.utils.matrix_codec import decode_pair_document, decode_rep_document
from storage_manager.file_manager import load_json_document, save_report


PAIR_COMMANDS = ("check-commute", "strong-commute", "flip", "dilate", "endo")
REP_COMMANDS = ("verify", "roundtrip")

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class JobSpec(BaseModel):
    """One CLI invocation after argument parsing."""

    model_config = ConfigDict(frozen=True)

    command: Literal["check-commute", "strong-commute", "flip", "dilate", "endo", "verify", "roundtrip"]
    input: str
    depth: Optional[int] = Field(default=None, ge=1)
    tol: Optional[float] = Field(default=None, gt=0)
    accept: Optional[float] = Field(default=None, gt=0)
    mu: Optional[int] = Field(default=None, ge=0)
    seed: Optional[int] = None
    out: Optional[str] = None
    pad: Optional[bool] = None

    def settings(self) -> WorkflowSettings:
        return WorkflowSettings.from_config(
            rank_eps=self.tol,
            accept=self.accept,
            depth=self.depth,
            mu=self.mu,
            seed=self.seed,
            pad=self.pad,
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dilation-cli",
        description="Commuting CP maps: flips, isometric dilations and endomorphic dilations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name in PAIR_COMMANDS + REP_COMMANDS:
        kind = "CP pair" if name in PAIR_COMMANDS else "product-system representation"
        p = sub.add_parser(name, help=f"{name} on a {kind} document")
        p.add_argument("--input", required=True, help=f"JSON document holding the {kind}")
        p.add_argument("--tol", type=float, help="relative rank tolerance")
        p.add_argument("--accept", type=float, help="pass/fail residual threshold")
        p.add_argument("--out", help="report path (default: sessions/<command>/session_<n>/report.json)")
        if name in ("dilate", "endo", "verify"):
            p.add_argument("--depth", type=int, help="truncation depth L")
            p.add_argument("--mu", type=int, help="padding multiplicity of the level spaces")
        if name in ("dilate", "endo"):
            p.add_argument("--pad", action="store_true", default=None, help="always use the padded families")
        if name == "endo":
            p.add_argument("--seed", type=int, help="seed of the random windowed test operators")
    return parser


def _dispatch(workflow: DilationWorkflow, job: JobSpec) -> Dict[str, Any]:
    document = load_json_document(job.input)
    if job.command in PAIR_COMMANDS:
        theta, phi = decode_pair_document(document)
        handlers: Dict[str, Callable[..., Dict[str, Any]]] = {
            "check-commute": workflow.check_commute,
            "strong-commute": workflow.strong_commute,
            "flip": workflow.flip,
            "dilate": workflow.dilate,
            "endo": workflow.endo,
        }
        return handlers[job.command](theta, phi)

    system, rep = decode_rep_document(document)
    handler = workflow.verify if job.command == "verify" else workflow.roundtrip
    return handler(system, rep)


def failure_report(command: str, error: Exception) -> Dict[str, Any]:
    identity = getattr(error, "identity", None) or "input_schema"
    report: Dict[str, Any] = {
        "command": command,
        "verdict": "fail",
        "failed_identity": identity,
        "error": type(error).__name__,
        "message": getattr(error, "error_message", str(error)),
    }
    context = getattr(error, "context", None)
    if context:
        report["context"] = context
    return report


def options_report(command: str, error: ValidationError) -> Dict[str, Any]:
    """Failure report for command-line options outside their allowed ranges."""
    return {
        "command": command,
        "verdict": "fail",
        "failed_identity": "cli_options",
        "error": type(error).__name__,
        "message": f"{error.error_count()} option(s) out of range",
        "context": {
            ".".join(str(p) for p in item["loc"]): item["msg"] for item in error.errors()
        },
    }


def print_summary(report: Dict[str, Any]):
    print(f"\n===== {report['command'].upper()} RESULT =====\n")
    table = identity_table(report)
    if not table.empty:
        with pd.option_context("display.max_rows", None, "display.width", 160):
            print(table.to_string(index=False))
    print(f"\nverdict: {report['verdict']}")
    if "failed_identity" in report:
        print(f"failed identity: {report['failed_identity']}")


def finish(command: str, report: Dict[str, Any], code: int, out: str | None = None) -> int:
    report = to_builtin(report)
    path = save_report(command, report, out)
    print_summary(report)
    print(f"report: {path}")
    logger.info("✅ Command finished", command=command, verdict=report["verdict"], exit_code=code)
    CustomLogger.log_separator()
    return code


def run(job: JobSpec) -> int:
    """Run one command, store its report and return the process exit code."""
    CustomLogger.log_separator()
    logger.info("🚀 Starting dilation command", command=job.command, input=job.input)
    try:
        workflow = DilationWorkflow(job.settings())
        report = _dispatch(workflow, job)
        code = EXIT_PASS if report["verdict"] == "pass" else EXIT_FAIL
    except INPUT_ERRORS as ie:
        logger.error("❌ Input rejected", error=str(ie))
        report, code = failure_report(job.command, ie), EXIT_INPUT
    except jsonschema.ValidationError as ve:
        logger.error("❌ Input violates its schema", error=ve.message)
        report, code = failure_report(job.command, ve), EXIT_INPUT
    except CustomException as ce:
        logger.error("❌ Command failed a verification", error=str(ce))
        report, code = failure_report(job.command, ce), EXIT_FAIL

    return finish(job.command, report, code, job.out)


def main(argv: List[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    options = {k: v for k, v in vars(args).items() if v is not None}
    try:
        job = JobSpec(**options)
    except ValidationError as ve:
        logger.error("❌ Options rejected", command=args.command, error=str(ve))
        return finish(args.command, options_report(args.command, ve), EXIT_INPUT, options.get("out"))
    return run(job)


if __name__ == "__main__":
    sys.exit(main())

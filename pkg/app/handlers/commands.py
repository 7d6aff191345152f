"""Command handlers for the CLI"""

import argparse
import logging
import sys
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from app.config import get_settings
from app.handlers.router import Router
from app.models import SweepSpec
from app.services.point_service import PointService
from app.services.sweep_service import SweepService
from app.services.verification_service import VerificationService
from app.utils.formatters import FORMATS, RecordFormatter

logger = logging.getLogger(__name__)

commands_router = Router()
point_service = PointService()
formatter = RecordFormatter()

SWEEP_OUTPUTS = ("concurrence", "gamma", "p_bell", "boundary")


def _output_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=FORMATS, default="csv", help="Output format")
    parser.add_argument("--out", default=None, help="Write to this file instead of stdout")


def _point_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--g", type=float, required=True, help="Measurement strength in [0, 1]")
    parser.add_argument("--theta", type=float, required=True, help="Axis tilt angle (radians)")
    parser.add_argument("--degrees", action="store_true", help="Read --theta in degrees")
    _output_arguments(parser)


def _sweep_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grid", default="0:1:50,0:3.141592653589793:50", help="g0:g1:n,t0:t1:m")
    parser.add_argument("--degrees", action="store_true", help="Read the theta range in degrees")
    parser.add_argument(
        "--outputs",
        default=",".join(SWEEP_OUTPUTS),
        help=f"Comma-separated subset of {','.join(SWEEP_OUTPUTS)}",
    )
    parser.add_argument("--threads", type=int, default=None, help="Worker threads (overrides HISTKIT_THREADS)")
    _output_arguments(parser)


def _verify_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=get_settings().DEFAULT_SEED, help="Random seed")
    parser.add_argument("--trials", type=int, default=get_settings().DEFAULT_TRIALS, help="Configurations per randomized suite")
    parser.add_argument("--suite", action="append", default=None, help="Run only this suite (repeatable)")
    parser.add_argument("--out", default=None, help="Write the report to this file instead of stdout")


def _theta(args: argparse.Namespace, value: float) -> float:
    return float(np.deg2rad(value)) if args.degrees else value


def _emit_text(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    logger.info(f"💾 Wrote {out}")


def _emit(records: Sequence[BaseModel], args: argparse.Namespace, columns: Optional[List[str]] = None) -> None:
    _emit_text(formatter.render(records, args.format, columns), args.out)


def _sweep_outputs(text: str) -> dict:
    chosen = {name.strip() for name in text.split(",") if name.strip()}
    unknown = chosen - set(SWEEP_OUTPUTS)
    if unknown:
        raise ValueError(f"unknown sweep outputs: {', '.join(sorted(unknown))}")
    return {name: name in chosen for name in SWEEP_OUTPUTS}


@commands_router.command("point", help="Evaluate the canonical example at one (g, theta)", arguments=_point_arguments)
def cmd_point(args: argparse.Namespace) -> int:
    """Handle `point`; an undefined point is still a successful run"""
    record = point_service.evaluate(args.g, _theta(args, args.theta))
    logger.info(f"Point g={record.g}, theta={record.theta}: status {record.status}")
    _emit([record], args)
    return 0


@commands_router.command("dilation", help="Compare Kraus and dilation sectors at one point", arguments=_point_arguments)
def cmd_dilation(args: argparse.Namespace) -> int:
    records = point_service.compare_dilation(args.g, _theta(args, args.theta))
    _emit(records, args)
    return 0


@commands_router.command("sweep", help="Sweep a (g, theta) grid", arguments=_sweep_arguments)
def cmd_sweep(args: argparse.Namespace) -> int:
    spec = SweepSpec.from_grid(args.grid, degrees=args.degrees, **_sweep_outputs(args.outputs))
    rows = SweepService(args.threads).run_blocking(spec)
    _emit(rows, args, columns=spec.columns())
    return 0


@commands_router.command("verify", help="Run every invariant suite", arguments=_verify_arguments)
def cmd_verify(args: argparse.Namespace) -> int:
    """Handle `verify`: exit 0 iff every suite passes"""
    service = VerificationService(seed=args.seed, trials=args.trials)
    report = service.run(only=args.suite)
    _emit_text(report.render(), args.out)
    if not report.passed:
        logger.error(f"Verification failed: {', '.join(report.failed_suites())}")
    return report.exit_code

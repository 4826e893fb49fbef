"""
Command-line entry point: ``petz-verify <suite> [flags]`` or ``python -m petz_geometry``.

Exit codes: 0 when every cell passes, 2 when a suite reports violations, 1 on usage
errors and on numerical failures outside the suites (bad specs, malformed matrices,
ill-conditioned inputs).
"""

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path

from pydantic import ValidationError

from . import __version__
from .api.schemas import MatrixPayload, SuiteConfig
from .config import config
from .core.errors import PetzGeometryError
from .core.functions import eval_f, parse_spec
from .core.metric import gradient_field
from .core.models import MetricSpec
from .core.states import density_state, observable_matrix
from .logging_config import get_logger, set_run_id, setup_logging
from .services.reporting import write_report
from .services.suites import SUITES, run_all, run_suite

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATIONS = 2


class UsageError(PetzGeometryError):
    """Invalid command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _split(text: str) -> list[str]:
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise argparse.ArgumentTypeError("expected a comma-separated list")
    return items


def _int_list(text: str) -> list[int]:
    try:
        return [int(item) for item in _split(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(item) for item in _split(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numbers, got {text!r}") from None


def _suite_flags() -> argparse.ArgumentParser:
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument("--dims", type=_int_list, help="Hilbert space dimensions, e.g. 2,3,4")
    flags.add_argument("--kappas", type=_float_list, help="Deformation parameters, e.g. 0.5,1")
    flags.add_argument("--specs", type=_split, help="Function specs, e.g. bh,wy,bkm,gl:0.3")
    flags.add_argument("--trials", type=int, help="Trials per cell")
    flags.add_argument("--witness-trials", type=int, help="Trials of the monotonicity witness search")
    flags.add_argument("--seed", type=int, help="Master seed")
    flags.add_argument("--tol-scale", type=float, default=1.0, help="Multiply every tolerance")
    flags.add_argument("--format", choices=("json", "csv"), default="json")
    flags.add_argument("--out", help="Report path (default: standard output)")
    flags.add_argument("--workers", type=int, help="Threads evaluating suite cells")
    flags.add_argument(
        "--include-timing", action="store_true", help="Serialize wall time into the report"
    )
    return flags


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="petz-verify", description="Monotone quantum metrics: verification suites")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    flags = _suite_flags()
    commands.add_parser("run-all", parents=[flags], help="Run every suite")
    for name in SUITES:
        help_text = "Monotonicity boundary scan (--kappas sets the scan grid)" if name == "kappa-scan" else None
        commands.add_parser(name, parents=[flags], help=help_text or f"Run the {name} suite")

    evaluate = commands.add_parser("eval", help="Evaluate f(x), or a gradient field with --state")
    evaluate.add_argument("--spec", required=True, help="Function spec, e.g. gl:0.5, bkm, wy")
    evaluate.add_argument("--x", type=float, help="Positive argument of f")
    evaluate.add_argument("--state", help="Density matrix JSON, inline or @path")
    evaluate.add_argument("--observable", help="Observable JSON, inline or @path")
    evaluate.add_argument("--prefactor", type=float, default=1.0, help="Metric prefactor")
    return parser


def suite_config(args: argparse.Namespace) -> SuiteConfig:
    """SuiteConfig from parsed flags; unset flags keep the configured defaults."""
    overrides = {
        "dims": args.dims,
        "specs": args.specs,
        "trials": args.trials,
        "witness_trials": args.witness_trials,
        "seed": args.seed,
        "workers": args.workers,
        "out": args.out,
    }
    if args.command == "kappa-scan":
        overrides["scan_kappas"] = args.kappas
        if args.witness_trials is None:
            overrides["witness_trials"] = args.trials
    else:
        overrides["kappas"] = args.kappas
    cfg = SuiteConfig(
        **{key: value for key, value in overrides.items() if value is not None},
        format=args.format,
        include_timing=args.include_timing,
    )
    return cfg if args.tol_scale == 1.0 else cfg.with_tol_scale(args.tol_scale)


def _load_matrix(text: str, what: str):
    raw = Path(text[1:]).read_text(encoding="utf-8") if text.startswith("@") else text
    try:
        payload = json.loads(raw)
    except json.JSONDecodeError as e:
        raise UsageError(f"--{what} is not valid JSON: {e}") from None
    if isinstance(payload, list):
        payload = {"dim": len(payload), "re": payload}
    return MatrixPayload.model_validate(payload).to_array()


def _run_eval(args: argparse.Namespace) -> int:
    spec = parse_spec(args.spec)
    if args.state is None and args.observable is None:
        if args.x is None:
            raise UsageError("eval needs --x, or --state and --observable")
        print(eval_f(spec, args.x))
        return EXIT_OK
    if args.state is None or args.observable is None:
        raise UsageError("--state and --observable must be given together")

    rho = density_state(_load_matrix(args.state, "state"))
    a = observable_matrix(_load_matrix(args.observable, "observable"))
    grad = gradient_field(MetricSpec(spec, prefactor=args.prefactor), a, rho)
    payload = MatrixPayload.from_array(grad.matrix, kind="tangent")
    print(json.dumps(payload.model_dump(mode="json"), sort_keys=True))
    return EXIT_OK


def _run_suites(args: argparse.Namespace) -> int:
    cfg = suite_config(args)
    report = run_all(cfg) if args.command == "run-all" else run_suite(args.command, cfg)
    write_report(report, cfg.format, cfg.out, stream=sys.stdout)
    if not report.passed:
        logger.warning(f"{len(report.violations)} violations in {report.suite}")
        return EXIT_VIOLATIONS
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_ERROR

    setup_logging(stream=sys.stderr, level=args.log_level)
    run_id = set_run_id()
    logger.debug(f"petz-verify {__version__} run {run_id}: {args.command} (log level {config.LOG_LEVEL})")

    try:
        if args.command == "eval":
            return _run_eval(args)
        return _run_suites(args)
    except (PetzGeometryError, ValidationError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

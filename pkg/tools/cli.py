"""CLI entry point for the curved zigzag verification suites.

Commands:
    verify-zigzag      Exact checks of the zigzag algebra, bar complex and Col.
    verify-pathspace   Numeric checks of transport, Stokes and the curved Chen map.
    cohomology         Curved cohomology tables and their agreement flags.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on a config error.

Usage:
    python -m tools.cli verify-zigzag --config fixtures/default_config.json
    python -m tools.cli verify-pathspace --seed 7 --json --out report.json
    python -m tools.cli cohomology -v
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

# Ensure the project root is on sys.path so imports work when run as a script.
_PROJECT_ROOT = str(Path(__file__).resolve().parent.parent)
if _PROJECT_ROOT not in sys.path:
    sys.path.insert(0, _PROJECT_ROOT)

from application.config import load_config
from application.report import Report, format_json_report, format_summary, format_text_report
from application.suites import run_suite
from core.errors import ConfigError

LOGGER = logging.getLogger("curved_zigzag")

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _write_report(report: Report, path: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(format_json_report(report) + "\n", encoding="utf-8")
    LOGGER.info("report written to %s", target)


def _run(suite: str, args: argparse.Namespace) -> int:
    """Load the config, run one suite and emit its report."""
    try:
        config = load_config(args.config).with_overrides(seed=args.seed, workers=args.workers, output=args.out)
    except ConfigError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    report = run_suite(suite, config)
    print(format_json_report(report) if args.json else format_text_report(report))
    if config.output:
        try:
            _write_report(report, config.output)
        except OSError as e:
            print(f"Error: cannot write report to {config.output}: {e}", file=sys.stderr)
            return EXIT_CONFIG
    LOGGER.info(format_summary(report))
    return EXIT_PASS if report.passed else EXIT_FAIL


def _cmd_verify_zigzag(args: argparse.Namespace) -> int:
    return _run("verify-zigzag", args)


def _cmd_verify_pathspace(args: argparse.Namespace) -> int:
    return _run("verify-pathspace", args)


def _cmd_cohomology(args: argparse.Namespace) -> int:
    return _run("cohomology", args)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Path to a JSON suite config (defaults apply otherwise).")
    parser.add_argument("--seed", type=int, help="Override the config seed.")
    parser.add_argument("--out", help="Also write the JSON report to this path.")
    parser.add_argument("--json", action="store_true", help="Print the report as JSON.")
    parser.add_argument("--workers", type=int, help="Override the worker count.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="Log INFO (-v) or DEBUG (-vv) to stderr.")


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser for the CLI."""
    parser = argparse.ArgumentParser(
        prog="curved-zigzag",
        description="Verify the curved zigzag algebra, its Chen map and curved cohomology.",
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    zigzag_parser = subparsers.add_parser(
        "verify-zigzag",
        help="Run the exact zigzag algebra suite.",
    )
    _add_common(zigzag_parser)
    zigzag_parser.set_defaults(func=_cmd_verify_zigzag)

    pathspace_parser = subparsers.add_parser(
        "verify-pathspace",
        help="Run the numeric path-space suite.",
    )
    _add_common(pathspace_parser)
    pathspace_parser.set_defaults(func=_cmd_verify_pathspace)

    cohomology_parser = subparsers.add_parser(
        "cohomology",
        help="Compute curved cohomology tables.",
    )
    _add_common(cohomology_parser)
    cohomology_parser.set_defaults(func=_cmd_cohomology)

    return parser


def main() -> None:
    """Main entry point for the CLI."""
    parser = build_parser()
    args = parser.parse_args()

    if not args.command:
        parser.print_help()
        sys.exit(1)

    _configure_logging(args.verbose)
    sys.exit(args.func(args))


if __name__ == "__main__":
    main()

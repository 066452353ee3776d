"""Rotational Geodesics - Entry Point.

Surfaces of rotation in E_2^4, their curvature, and the geodesics of the
three rotational 3-submanifolds with their Clairaut constants.

Subcommands:
1. surface   → mesh CSV and curvature summary over a (t, s) grid
2. geodesic  → trajectory CSV/JSON, energy report, drift table
3. sweep     → one geodesic per (phi, theta) node, summary CSV
4. check     → verification suites and their JSON report
5. plot      → drift and orbit SVGs

Exit codes: 0 ok, 1 drift/suite failure or unexpected error, 2 bad
config, 3 degenerate surface grid, 4 early termination.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import metrics
from .checks import SUITES, run_checks
from .config import settings
from .exceptions import ConfigError, GeometryError
from .models import FormulaVariant
from .runconfig import load_config
from .runner import EXIT_CONFIG, EXIT_FAILURE, EXIT_OK, GeodesicRunner

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.log_level.upper()),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    handlers=[
        logging.StreamHandler(sys.stdout),
    ],
)

logger = logging.getLogger(__name__)

COMMANDS = ("surface", "geodesic", "sweep", "check", "plot")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rotational-geodesics",
        description="Rotational surfaces and geodesics in pseudo-Euclidean E_2^4",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="run file (dotted key = value)")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--variant", choices=[v.value for v in FormulaVariant], default=None)
    parser.add_argument("--allow-early", action="store_true", help="exit 0 when a geodesic stops early")
    parser.add_argument("--suite", action="append", choices=list(SUITES), help="check suite (repeatable)")
    parser.add_argument("--workers", type=int, default=None, help="sweep worker processes")
    return parser


def _run(args: argparse.Namespace) -> int:
    out_dir = args.out or Path(settings.output_dir)

    if args.command == "check":
        variant = FormulaVariant(args.variant or FormulaVariant.CORRECTED)
        results = run_checks(args.suite, variant=variant, out_dir=out_dir)
        return EXIT_OK if all(r.passed for r in results) else EXIT_FAILURE

    if args.config is None:
        raise ConfigError(f"'{args.command}' needs --config")
    config = load_config(args.config).with_variant(args.variant)
    workers = args.workers or settings.default_workers
    if workers < 1:
        raise ConfigError(f"--workers must be at least 1, got {workers}")

    logger.info(f"Family: {config.family.value} ({config.family.submanifold})")
    logger.info(f"Variant: {config.variant.value}")
    logger.info(f"Profile: {config.profile.kind.value} ({config.profile.pattern.value})")
    logger.info(f"Output: {out_dir}")

    runner = GeodesicRunner(config, out_dir, allow_early=args.allow_early, workers=workers)
    return getattr(runner, args.command)()


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point.  Returns the process exit code."""
    args = build_parser().parse_args(argv)

    if metrics.init_metrics() and settings.metrics_enabled:
        metrics.start_metrics_server()

    logger.info("=" * 60)
    logger.info(f"ROTATIONAL GEODESICS: {args.command}")
    logger.info("=" * 60)

    try:
        code = _run(args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        code = EXIT_CONFIG
    except GeometryError as e:
        logger.error(f"{type(e).__name__}: {e}")
        code = EXIT_FAILURE
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        code = EXIT_FAILURE
    finally:
        metrics.write_metrics_textfile()

    logger.info(f"Exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())

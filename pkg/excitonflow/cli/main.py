#!/usr/bin/env python3
"""
ExcitonFlow command line.

    excitonflow run <experiment> [--config PATH] [--set key=value]... [--out DIR]
                                 [--workers N] [--quiet]
    excitonflow validate <config>
    excitonflow presets

Exit status: 0 on success, 2 for configuration errors, 3 for numerical
failures (the offending grid point is named).
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

from pydantic import ValidationError

from excitonflow.cli.config import diagnose, flatten, load_config_file, load_presets, resolve_config
from excitonflow.cli.experiments import list_experiments, run_experiment
from excitonflow.core.errors import ConfigurationError, GridPointError, NumericalError

logger = logging.getLogger("excitonflow")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def configure_logging(quiet: bool = False) -> None:
    level = "WARNING" if quiet else os.environ.get("LOG_LEVEL", "INFO").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def cmd_run(args: argparse.Namespace) -> int:
    cfg = resolve_config(args.experiment, args.config, args.set or [], args.out, args.workers)
    manifest = run_experiment(cfg)
    print(manifest)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    flat = load_config_file(args.config)
    experiment = flat.get("experiment")
    if experiment:
        presets = load_presets()
        if experiment in presets:
            flat = {**flatten(presets[experiment] or {}), **flat}
    problems = diagnose(flat)
    if problems:
        for problem in problems:
            print(problem)
        return EXIT_CONFIG
    print("ok")
    return EXIT_OK


def cmd_presets(args: argparse.Namespace) -> int:
    for name, description in list_experiments():
        print(f"{name:<22} {description}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="excitonflow",
        description="Exciton transfer on mechanically driven molecular chains",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run an experiment")
    run.add_argument("experiment", help="Experiment name (see `excitonflow presets`)")
    run.add_argument("--config", help="Config file (key = value text, YAML, or a run manifest)")
    run.add_argument("--set", action="append", metavar="KEY=VALUE", help="Override one config key")
    run.add_argument("--out", help="Output directory")
    run.add_argument("--workers", type=int, help="Worker processes (default: $EXCITON_WORKERS or 1)")
    run.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
    run.set_defaults(handler=cmd_run)

    validate = sub.add_parser("validate", help="Check a config file without running")
    validate.add_argument("config", help="Config file")
    validate.set_defaults(handler=cmd_validate, quiet=False)

    presets = sub.add_parser("presets", help="List experiments")
    presets.set_defaults(handler=cmd_presets, quiet=False)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.quiet)
    try:
        return args.handler(args)
    except ValidationError as exc:
        for err in exc.errors():
            print(f"config error: {'.'.join(str(p) for p in err['loc'])}: {err['msg']}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigurationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GridPointError as exc:
        print(f"numerical error at {exc.label}={exc.value}: {exc.cause}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

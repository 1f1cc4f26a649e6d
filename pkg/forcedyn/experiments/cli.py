"""
Command-line entry point.

Usage::

    forcedyn gen-data --config experiment.yaml --seed 1 --out runs/seed1
    forcedyn train-dynamics --out runs/seed1 --set dynamics.episodes=4000
    forcedyn report runs/seed1 runs/seed2 runs/seed3

Exit codes: 0 on success, 1 on a configuration or argument error, 2 on any
other failure.
"""

import argparse
import logging
import sys
from typing import List, NoReturn, Optional, Sequence

from .. import __version__
from ..core.exceptions import ConfigError, ForceDynError
from .commands import COMMANDS, cmd_report
from .config import load_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

_HELP = {
    "gen-data": "probe grids and synthesize trajectories",
    "train-dynamics": "pretrain the dynamics model on the training holes",
    "finetune": "finetune on each data fraction of the testing holes",
    "eval-dynamics": "held-out error of the finetuned models",
    "run-mpc": "benchmark the model predictive controller",
    "train-rl": "train policies against the finetuned dynamics",
    "eval-policy": "benchmark the trained policies",
    "online-baseline": "train policies on the simulator and count probes",
}


class _ArgumentParser(argparse.ArgumentParser):
    """Raises ConfigError instead of exiting on bad arguments."""

    def error(self, message: str) -> NoReturn:
        raise ConfigError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per experiment step plus ``report``."""
    parser = _ArgumentParser(
        prog="forcedyn",
        description="Model-based peg-in-hole experiments on a simulated force sensor.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="INFO logging; repeat for DEBUG"
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    for name, help_text in _HELP.items():
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--config", help="YAML configuration file")
        sub.add_argument("--seed", type=int, help="root seed (overrides experiment.seed)")
        sub.add_argument("--out", help="run directory (overrides experiment.out)")
        sub.add_argument(
            "--set",
            dest="overrides",
            action="append",
            default=[],
            metavar="SECTION.KEY=VALUE",
            help="override one configuration value; may be repeated",
        )

    report = subparsers.add_parser("report", help="aggregate results across run directories")
    report.add_argument("run_dirs", nargs="+", metavar="RUN_DIR")
    report.add_argument("--out", help="directory for the summary tables (default: stdout)")
    return parser


def configure_logging(verbosity: int) -> None:
    """WARNING by default, INFO with ``-v``, DEBUG with ``-vv``."""
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse arguments and run one command.

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG
    configure_logging(args.verbose)

    try:
        if args.command == "report":
            summary = cmd_report(args.run_dirs, args.out)
            if args.out is None:
                sys.stdout.write(summary.render())
            return EXIT_OK
        config = load_config(args.config, args.overrides, seed=args.seed, out=args.out)
        manifest = COMMANDS[args.command](config)
        logger.info("%s wrote %d files", args.command, len(manifest.outputs))
    except ConfigError as exc:
        logger.error("Configuration error: %s", exc)
        return EXIT_CONFIG
    except (ForceDynError, OSError, ValueError) as exc:
        logger.error("%s failed: %s", args.command, exc)
        return EXIT_RUNTIME
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> None:
    """Console script entry point."""
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

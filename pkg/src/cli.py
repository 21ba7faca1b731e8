"""
Command-line front end

    selmut <iterate|limit|verify|compare> --scenario PATH [--scenario PATH ...]
           [--out-dir DIR] [--workers N] [--log-level LEVEL]
    selmut schema

Flags only select the subcommand and file locations; every model parameter
lives in the scenario file.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .core.config import get_settings
from .scenario import Command, run_batch
from .schemas import scenario_json_schema
from .utils.logging_config import SelmutLogger, setup_logging

logger = SelmutLogger.get_logger(__name__)

RUN_COMMANDS = [Command.ITERATE, Command.LIMIT, Command.VERIFY, Command.COMPARE]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selmut",
        description="Selection-mutation measure dynamics: trajectories, limits and checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command in RUN_COMMANDS:
        p = sub.add_parser(command.value, help=f"{command.value} the given scenarios")
        p.add_argument(
            "--scenario", action="append", required=True, metavar="PATH",
            help="Scenario JSON file (repeat for a batch)",
        )
        p.add_argument("--out-dir", default=".", help="Directory for the declared outputs")
        p.add_argument("--workers", type=int, default=1, help="Scenarios run in parallel")
        p.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    sub.add_parser("schema", help="Print the scenario JSON schema")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "schema":
        sys.stdout.write(json.dumps(scenario_json_schema(), indent=2) + "\n")
        return 0

    settings = get_settings()
    setup_logging(
        str(Path(args.out_dir) / settings.logging.log_file),
        console_level=args.log_level or settings.logging.console_level,
        file_level=settings.logging.file_level,
    )
    plans = run_batch(args.scenario, args.out_dir, Command(args.command), workers=args.workers)
    failed = [p for p in plans if p.exit_status != 0]
    if failed:
        for plan in failed:
            logger.error(f"❌ {plan.scenario_path}: not every declared output was produced")
        return 1
    logger.info(f"✅ {len(plans)} scenario(s) complete")
    return 0


if __name__ == "__main__":
    sys.exit(main())

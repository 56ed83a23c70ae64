"""Command-line front end.

Exit codes: 0 success, 1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from . import __version__
from .config import load_bundled_config, load_config
from .controller import ADVANTAGE, ControllerConfig, decide, scenario_of
from .engine import DEFAULT_BACKEND, run
from .errors import DomainError, SimulationError, ValidationError
from .telemetry import RunReport, write_telemetry

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


def _error(msg: str) -> None:
    print(f"solarshare: error: {msg}", file=sys.stderr)


def cmd_simulate(config_path: Optional[str], out_path: str) -> int:
    try:
        config = load_bundled_config() if config_path is None else load_config(config_path)
    except OSError as exc:
        _error(f"cannot read config: {exc}")
        return EXIT_IO
    except (ValidationError, DomainError) as exc:
        _error(f"{config_path}: {exc}")
        return EXIT_VALIDATION
    try:
        records = run(config)
    except SimulationError as exc:
        _error(str(exc))
        return EXIT_VALIDATION
    try:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            write_telemetry(records, fh)
    except OSError as exc:
        _error(f"cannot write telemetry: {exc}")
        return EXIT_IO
    print(RunReport.from_records(records, config).format())
    return EXIT_OK


def cmd_scenario(soc1: float, soc2: float, threshold: float = 50.0) -> int:
    try:
        state = decide(soc1, soc2, ControllerConfig(threshold=threshold))
    except DomainError as exc:
        _error(str(exc))
        return EXIT_VALIDATION
    scenario = scenario_of(state)
    print(state)
    print(f"scenario {scenario}")
    print(ADVANTAGE[scenario])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="solarshare",
        description="Simulate two PV+battery subsystems sharing batteries under SOC rules.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log clamp events and backend")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a configured simulation and write telemetry CSV")
    sim.add_argument("--config", help="config file (default: bundled default scenario)")
    sim.add_argument("--out", required=True, help="telemetry CSV output path")

    sc = sub.add_parser("scenario", help="evaluate the sharing rules for one SOC pair")
    sc.add_argument("--soc1", type=float, required=True, help="battery 1 SOC in percent")
    sc.add_argument("--soc2", type=float, required=True, help="battery 2 SOC in percent")
    sc.add_argument("--threshold", type=float, default=50.0, help="sufficiency threshold (default 50)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger(__name__).debug("simulation backend: %s", DEFAULT_BACKEND)
    if args.command == "simulate":
        return cmd_simulate(args.config, args.out)
    return cmd_scenario(args.soc1, args.soc2, args.threshold)


if __name__ == "__main__":
    sys.exit(main())

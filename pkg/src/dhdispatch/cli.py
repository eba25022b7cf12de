"""Command line entry point: ``dhdispatch run|validate|demand``.

Exit codes: 0 success, 1 infeasible, 2 config error, 3 data error,
4 internal-consistency or solver error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import OBJECTIVES, load_config, reference_config_path, validate_scenario
from .errors import ConfigError, DispatchError


def _resolve(path: str) -> Path:
    """A file path, or the name of a shipped config (``scenario1`` .. ``scenario3``)."""
    p = Path(path)
    if p.exists() or p.suffix:
        return p
    return reference_config_path(path)


def _load(args):
    config = load_config(_resolve(args.config))
    changes = {}
    if getattr(args, "objective", None):
        changes["objective"] = args.objective
    if getattr(args, "points", None) is not None:
        changes["n_pareto_points"] = args.points
    if getattr(args, "step", None) is not None:
        changes["step_hours"] = args.step
    if changes:
        config = config.with_run(**changes)
        problems = validate_scenario(config)
        if problems:
            raise ConfigError("invalid options: " + "; ".join(problems))
    return config


def cmd_run(args) -> int:
    from .report import run_scenario

    config = _load(args)
    out = args.out or config.run.output_dir
    report = run_scenario(config, out, overwrite=args.overwrite)
    s = report.solution
    print(f"{config.id}: {report.objective} run, {report.problem.horizon} steps of {report.problem.step:g} h")
    print(f"  cost {s.cost:,.0f} CHF, emissions {s.emissions:,.0f} t CO2-eq "
          f"(+{report.background.emissions:,.0f} t background)")
    for label, key in (("WtE", "wte"), ("CCGT", "ccgt"), ("wood", "wood")):
        print(f"  {label:<5} heat {s.heat_total(key) / 1000:8.2f} GWh")
    print(f"  curtailed {s.curtailment_total / 1000:8.2f} GWh")
    if report.front is not None:
        print(f"  Pareto front: {len(report.front)} points")
    print(f"  written to {out}")
    return 0


def cmd_validate(args) -> int:
    config = _load(args)
    print(f"{config.id}: valid ({config.name})")
    return 0


def cmd_demand(args) -> int:
    from .report import write_demand

    config = _load(args)
    demand = write_demand(config, args.out, overwrite=args.overwrite)
    total = float(demand.dhn_heat.values.sum() * demand.dhn_heat.step)
    print(f"{config.id}: DHN heat {total / 1000:.2f} GWh over {len(demand.dhn_heat)} steps, written to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dhdispatch", description="District heating dispatch optimisation.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="optimise a scenario and write its report")
    run.add_argument("--config", required=True, help="config file or shipped name (scenario1..3)")
    run.add_argument("--objective", choices=OBJECTIVES)
    run.add_argument("--points", type=int, help="number of Pareto points")
    run.add_argument("--step", type=int, help="time step in hours (demand is block-averaged)")
    run.add_argument("--out", help="output directory")
    run.add_argument("--overwrite", action="store_true", help="replace an existing output directory")
    run.set_defaults(func=cmd_run)

    val = sub.add_parser("validate", help="check a config without solving")
    val.add_argument("--config", required=True)
    val.set_defaults(func=cmd_validate)

    dem = sub.add_parser("demand", help="write the demand profiles of a scenario")
    dem.add_argument("--config", required=True)
    dem.add_argument("--out", required=True)
    dem.add_argument("--overwrite", action="store_true")
    dem.set_defaults(func=cmd_demand)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DispatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

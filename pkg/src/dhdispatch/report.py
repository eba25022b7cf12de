"""Scenario runs and their report artifacts.

A run owns one output directory holding::

    dispatch_hourly.csv   per-step flows (MW) and per-step cost/emissions
    daily.csv             per-day energy (MWh)
    annual_totals.csv     per-technology annual totals (GWh)
    pareto.csv            front points (header only for single-objective runs)
    background.csv        non-DHN heat supply by heater type
    report.json           machine-readable summary
    resolved_config.cfg   the fully defaulted config that produced the run

Files are first written to a scratch directory next to the target and
renamed into place, so a failed run leaves nothing behind.
"""
from __future__ import annotations

import json
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from datetime import timedelta
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .config import ScenarioConfig, format_config
from .demand import DemandProfile
from .errors import ConfigError, ConsistencyError, DispatchError, DomainError
from .formulation import DispatchProblem, DispatchSolution, TECH_ROLES
from .pareto import ParetoFront, pareto_front, solve_single
from .scenario import ScenarioDemand, build_problem, scenario_demand

HOURLY_COLUMNS = (
    "timestep", "timestamp", "duration_h", "heat_demand_mw", "electricity_demand_mw",
    "fuel_wte_mw", "fuel_gt_mw", "fuel_wb_mw", "heat_wte_mw", "heat_ccgt_mw", "heat_wood_mw",
    "el_wte_mw", "el_ccgt_mw", "el_wood_mw", "steam_dump_mw", "heat_curtail_mw",
    "storage_charge_mw", "storage_discharge_mw", "soc_start_mwh", "grid_import_mw", "grid_export_mw",
    "cost_chf", "emissions_tco2",
)
# Columns summed per day; the "_mw" suffix becomes "_mwh".
DAILY_SOURCES = (
    "heat_demand_mw", "electricity_demand_mw", "heat_wte_mw", "heat_ccgt_mw", "heat_wood_mw",
    "el_wte_mw", "el_ccgt_mw", "el_wood_mw", "heat_curtail_mw", "storage_charge_mw",
    "storage_discharge_mw", "grid_import_mw", "grid_export_mw",
)
TECH_LABELS = ("wte", "ccgt", "wood")


class OutputExistsError(ConfigError):
    """The output directory exists and overwriting was not requested."""


@dataclass
class Table:
    """Named, equally long columns with a fixed order."""

    columns: dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def to_csv(self) -> str:
        names = list(self.columns)
        lines = [",".join(names)]
        cols = [self.columns[n] for n in names]
        for i in range(len(self)):
            lines.append(",".join(_fmt(c[i]) for c in cols))
        return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    if isinstance(value, (str, np.str_)):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if v == 0:
        v = 0.0  # no "-0.000000"
    return f"{v:.6f}"


@dataclass
class BackgroundReport:
    rows: list[dict]  # heater, fraction, heat_mwh, final_energy_mwh, emissions_tco2

    @property
    def emissions(self) -> float:
        return float(sum(r["emissions_tco2"] for r in self.rows))

    @property
    def heat(self) -> float:
        return float(sum(r["heat_mwh"] for r in self.rows))

    def to_csv(self) -> str:
        out = ["heater,fraction,heat_mwh,final_energy_mwh,emissions_tco2"]
        for r in self.rows:
            out.append(f"{r['heater']},{_fmt(r['fraction'])},{_fmt(r['heat_mwh'])},"
                       f"{_fmt(r['final_energy_mwh'])},{_fmt(r['emissions_tco2'])}")
        return "\n".join(out) + "\n"


@dataclass
class RunReport:
    scenario_id: str
    objective: str
    config: ScenarioConfig
    problem: DispatchProblem
    solution: DispatchSolution  # the dispatch written to the hourly table
    hourly: Table
    daily: Table
    annual: Table
    background: BackgroundReport
    front: Optional[ParetoFront] = None
    solutions: dict = field(default_factory=dict)

    @property
    def cost(self) -> float:
        return self.solution.cost

    @property
    def emissions(self) -> float:
        return self.solution.emissions

    @property
    def storage_trajectory(self) -> np.ndarray:
        return self.solution.soc

    @property
    def system_emissions(self) -> float:
        return self.emissions + self.background.emissions

    def annual_heat_gwh(self, tech: str) -> float:
        return self.solution.heat_total(tech) / 1000.0


# -- tables ------------------------------------------------------------------

def hourly_table(solution: DispatchSolution, problem: DispatchProblem, start) -> Table:
    s, p = solution, problem
    dt = p.step
    H = p.horizon
    per_step_cost = np.zeros(H)
    per_step_emis = np.zeros(H)
    for r in TECH_ROLES:
        tech = p.tech(r)
        per_step_cost += tech.fuel.cost_per_mwh * s.fuel[r] * dt
        per_step_emis += tech.emissions_per_fuel_mwh * s.fuel[r] * dt
    per_step_cost += dt * (p.grid.import_price * s.grid_import - p.grid.export_price * s.grid_export)
    per_step_emis += dt * p.grid.import_intensity * s.grid_import
    stamps = np.array([(start + timedelta(hours=k * dt)).isoformat() for k in range(H)])
    cols = {
        "timestep": np.arange(H),
        "timestamp": stamps,
        "duration_h": np.full(H, dt),
        "heat_demand_mw": np.asarray(p.heat_demand.values),
        "electricity_demand_mw": np.asarray(p.electricity_demand.values),
        "fuel_wte_mw": s.fuel["wte"], "fuel_gt_mw": s.fuel["gt"], "fuel_wb_mw": s.fuel["wb"],
        "heat_wte_mw": s.heat["wte"], "heat_ccgt_mw": s.heat["ccgt"], "heat_wood_mw": s.heat["wood"],
        "el_wte_mw": s.electricity["wte"], "el_ccgt_mw": s.electricity["ccgt"],
        "el_wood_mw": s.electricity["wood"],
        "steam_dump_mw": s.steam_dump, "heat_curtail_mw": s.heat_curtail,
        "storage_charge_mw": s.charge, "storage_discharge_mw": s.discharge,
        "soc_start_mwh": s.soc[:H],
        "grid_import_mw": s.grid_import, "grid_export_mw": s.grid_export,
        "cost_chf": per_step_cost, "emissions_tco2": per_step_emis,
    }
    assert tuple(cols) == HOURLY_COLUMNS
    for label, total, column in (("cost", s.cost, per_step_cost), ("emissions", s.emissions, per_step_emis)):
        scale = max(1.0, float(np.abs(column).sum()))
        if abs(float(column.sum()) - total) > 1e-6 * scale:
            raise ConsistencyError(f"hourly {label} column sums to {column.sum()}, solution reports {total}")
    return Table(cols)


def aggregate_daily(table: Table, start=None) -> Table:
    """Per-day MWh of every power column; a trailing partial day gets its own row.

    Steps must be whole hours. Each step's energy is spread evenly over its
    hours, so steps that straddle midnight are split between days.
    """
    dt = float(table["duration_h"][0]) if len(table) else 1.0
    if abs(dt - round(dt)) > 1e-12 or dt < 1:
        raise DomainError(f"daily aggregation needs whole-hour steps, got {dt} h")
    rep = int(round(dt))
    hours = len(table) * rep
    n_days = -(-hours // 24)
    out: dict[str, np.ndarray] = {"day": np.arange(n_days)}
    if start is not None:
        out["date"] = np.array([(start + timedelta(days=d)).date().isoformat() for d in range(n_days)])
    for name in DAILY_SOURCES:
        hourly = np.repeat(np.asarray(table[name], dtype=float), rep)  # MWh per hour
        padded = np.zeros(n_days * 24)
        padded[:hours] = hourly
        out[name[:-3] + "_mwh"] = padded.reshape(n_days, 24).sum(axis=1)
    return Table(out)


def annual_table(solution: DispatchSolution, problem: DispatchProblem) -> Table:
    dt = problem.step
    s = solution
    names = list(TECH_LABELS) + ["grid_import", "grid_export", "storage_charge", "storage_discharge", "curtailment"]
    heat = [s.heat_total(k) for k in TECH_LABELS] + [0.0, 0.0, dt * s.charge.sum(), dt * s.discharge.sum(),
                                                      s.curtailment_total]
    el = [s.electricity_total(k) for k in TECH_LABELS] + [dt * s.grid_import.sum(), dt * s.grid_export.sum(),
                                                          0.0, 0.0, 0.0]
    return Table({"item": np.array(names), "heat_gwh": np.array(heat) / 1000.0,
                  "electricity_gwh": np.array(el) / 1000.0})


def background_supply_report(config: ScenarioConfig, city_heat: DemandProfile) -> BackgroundReport:
    """Non-DHN heat, (1 - share) of the city demand, split over the heater mix."""
    share = config.demand.dhn_share
    remaining = (1.0 - share) * float(np.sum(city_heat.values) * city_heat.step)
    if share >= 1.0 or remaining <= 0:
        return BackgroundReport([])
    rows = []
    for b in config.background:
        heat = remaining * b.fraction
        rows.append({"heater": b.name, "fraction": b.fraction, "heat_mwh": heat,
                     "final_energy_mwh": heat / b.efficiency, "emissions_tco2": heat * b.intensity})
    return BackgroundReport(rows)


# -- orchestration -------------------------------------------------------------

def _summary(report: RunReport, demand: ScenarioDemand) -> dict:
    s = report.solution
    cfg = report.config
    out = {
        "scenario": {"id": cfg.id, "name": cfg.name, "kind": cfg.kind},
        "objective": report.objective,
        "step_hours": report.problem.step,
        "horizon_steps": report.problem.horizon,
        "dhn_share": cfg.demand.dhn_share,
        "dhn_heat_demand_gwh": float(np.sum(demand.dhn_heat.values) * demand.dhn_heat.step) / 1000.0,
        "city_heat_demand_gwh": float(np.sum(demand.city_heat.values) * demand.city_heat.step) / 1000.0,
        "cost_chf": s.cost,
        "emissions_tco2": s.emissions,
        "heat_gwh": {k: s.heat_total(k) / 1000.0 for k in TECH_LABELS},
        "electricity_gwh": {k: s.electricity_total(k) / 1000.0 for k in TECH_LABELS},
        "curtailment_gwh": s.curtailment_total / 1000.0,
        "storage": None if cfg.storage is None else {
            "max_soc_mwh": float(np.max(s.soc)),
            "charged_gwh": float(np.sum(s.charge) * s.step) / 1000.0,
            "discharged_gwh": float(np.sum(s.discharge) * s.step) / 1000.0,
        },
        "background_emissions_tco2": report.background.emissions,
        "system_emissions_tco2": report.system_emissions,
        "solver_iterations": s.iterations,
    }
    if report.front is not None:
        out["pareto"] = [{"epsilon_tco2": p.epsilon, "cost_chf": p.cost, "emissions_tco2": p.emissions,
                          "solution_id": p.solution_id} for p in report.front.points]
    return out


def _with_context(exc: DispatchError, scenario_id: str) -> DispatchError:
    if exc.args and isinstance(exc.args[0], str) and not exc.args[0].startswith("scenario "):
        exc.args = (f"scenario {scenario_id}: {exc.args[0]}",) + exc.args[1:]
    return exc


def solve_scenario(config: ScenarioConfig, demand: Optional[ScenarioDemand] = None) -> RunReport:
    """Synthesise demand, solve as requested by ``config.run`` and assemble the report (no I/O)."""
    try:
        demand = demand if demand is not None else scenario_demand(config)
        problem = build_problem(config, demand)
        objective = config.run.objective
        front = None
        if objective == "pareto":
            front = pareto_front(problem, config.run.n_pareto_points, context=f"scenario {config.id}")
            solution = front.emissions_optimal
            solutions = {"emissions": front.emissions_optimal, "cost": front.cost_optimal}
        else:
            solution = solve_single(problem, objective, context=f"scenario {config.id}")
            solutions = {objective: solution}
        start = demand.weather.start
        hourly = hourly_table(solution, problem, start)
        return RunReport(
            scenario_id=config.id, objective=objective, config=config, problem=problem,
            solution=solution, hourly=hourly, daily=aggregate_daily(hourly, start),
            annual=annual_table(solution, problem),
            background=background_supply_report(config, demand.city_heat),
            front=front, solutions=solutions)
    except DispatchError as exc:
        raise _with_context(exc, config.id)


def _commit(files: dict[str, str], out_dir: Path, overwrite: bool) -> None:
    out_dir = Path(out_dir)
    parent = out_dir.parent
    parent.mkdir(parents=True, exist_ok=True)
    scratch = Path(tempfile.mkdtemp(prefix=f".{out_dir.name}.", dir=parent))
    try:
        for name, text in files.items():
            with open(scratch / name, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        if out_dir.exists():
            if not overwrite:
                raise OutputExistsError(f"output directory {out_dir} exists (use --overwrite)")
            shutil.rmtree(out_dir)
        os.chmod(scratch, 0o755)
        os.replace(scratch, out_dir)
    except BaseException:
        shutil.rmtree(scratch, ignore_errors=True)
        raise


def _check_target(out_dir: Path, overwrite: bool) -> None:
    if Path(out_dir).exists() and not overwrite:
        raise OutputExistsError(f"output directory {out_dir} exists (use --overwrite)")


def run_scenario(config: ScenarioConfig, out_dir: Optional[Union[str, Path]] = None,
                 overwrite: bool = False) -> RunReport:
    """Solve a scenario and write every artifact to ``out_dir`` (default: the config's)."""
    out_dir = Path(out_dir if out_dir is not None else config.run.output_dir)
    _check_target(out_dir, overwrite)
    demand = scenario_demand(config)
    report = solve_scenario(config, demand)
    summary = _summary(report, demand)
    files = {
        "dispatch_hourly.csv": report.hourly.to_csv(),
        "daily.csv": report.daily.to_csv(),
        "annual_totals.csv": report.annual.to_csv(),
        "pareto.csv": (report.front.to_csv() if report.front is not None
                       else "epsilon_tco2,cost_chf,emissions_tco2,solution_id\n"),
        "background.csv": report.background.to_csv(),
        "report.json": json.dumps(summary, indent=2, sort_keys=True, allow_nan=False,
                                  default=_json_default) + "\n",
        "resolved_config.cfg": format_config(config),
    }
    _commit(files, out_dir, overwrite)
    return report


def write_demand(config: ScenarioConfig, out_dir: Union[str, Path], overwrite: bool = False) -> ScenarioDemand:
    """Write the demand profiles of a scenario (no optimisation)."""
    out_dir = Path(out_dir)
    _check_target(out_dir, overwrite)
    demand = scenario_demand(config)
    temps = demand.weather
    lines = ["timestamp,temperature_c"]
    for k, v in enumerate(temps.values):
        lines.append(f"{(temps.start + timedelta(hours=k * temps.step)).isoformat()},{_fmt(v)}")
    _commit({
        "heat_demand_dhn.csv": demand.dhn_heat.to_csv(),
        "heat_demand_city.csv": demand.city_heat.to_csv(),
        "electricity_demand.csv": demand.electricity.to_csv(),
        "weather.csv": "\n".join(lines) + "\n",
        "resolved_config.cfg": format_config(config),
    }, out_dir, overwrite)
    return demand


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serialisable: {type(obj).__name__}")


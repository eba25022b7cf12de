"""Hourly dispatch LP for the power production site.

Topology: the waste-to-energy CHP feeds heat straight into the district
heating network (DHN); the gas turbine and the wood boiler raise steam for
a shared back-pressure steam turbine, which delivers heat to the DHN and
electricity to the city. An optional seasonal store sits on the DHN side,
and the grid closes the electricity balance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .core import (HOURS_PER_YEAR, CarrierFlow, StorageSpec, SteamTurbineSpec, TechnologySpec,
                   convert, emission_rate, fuel_cost_rate, storage_step)
from .demand import DemandProfile
from .errors import ConfigError, ConsistencyError, DataError, DomainError
from .lp import INF, LinearProgram, LpSolution

TECH_ROLES = ("wte", "gt", "wb")
_CARRIER_OF_FUEL = {"waste": "waste", "natural_gas": "gas", "gas": "gas", "wood": "wood"}


@dataclass(frozen=True)
class GridSpec:
    """Grid exchange. Prices in CHF/MWh, intensity in t/MWh."""

    import_price: float = 200.0
    export_price: float = 80.0
    import_intensity: float = 0.128
    import_capacity: float = INF
    export_capacity: float = INF

    def violations(self) -> list[str]:
        out = []
        for label in ("import_price", "export_price", "import_intensity"):
            if not math.isfinite(getattr(self, label)):
                out.append(f"grid: {label} must be finite")
        if self.import_intensity < 0:
            out.append("grid: import_intensity must be >= 0")
        if not (self.import_capacity >= 0 and self.export_capacity >= 0):
            out.append("grid: capacities must be >= 0")
        return out


@dataclass(frozen=True)
class DispatchProblem:
    horizon: int
    step: float
    wte: TechnologySpec
    gas_turbine: TechnologySpec
    wood_boiler: TechnologySpec
    steam_turbine: SteamTurbineSpec
    heat_demand: DemandProfile
    electricity_demand: DemandProfile
    grid: GridSpec = field(default_factory=GridSpec)
    storage: Optional[StorageSpec] = None
    requires_storage: bool = False
    allow_steam_dump: bool = True
    hours_per_year: float = HOURS_PER_YEAR

    def __post_init__(self):
        if not self.step > 0:
            raise DomainError("step must be > 0")
        for profile in (self.heat_demand, self.electricity_demand):
            if len(profile.values) != self.horizon:
                raise DataError(f"{profile.carrier} profile has {len(profile.values)} steps, horizon is {self.horizon}")
            if not np.all(np.isfinite(profile.values)):
                raise DataError(f"{profile.carrier} demand contains non-finite values")
            if abs(profile.step - self.step) > 1e-12:
                raise DataError(f"{profile.carrier} profile step {profile.step} h differs from {self.step} h")
        if self.wte.thermal_output_carrier != "heat":
            raise ConfigError("the waste-to-energy CHP must deliver heat to the DHN")
        for tech in (self.gas_turbine, self.wood_boiler):
            if tech.thermal_output_carrier != "steam":
                raise ConfigError(f"{tech.name} must deliver steam to the steam turbine")

    def tech(self, role: str) -> TechnologySpec:
        return {"wte": self.wte, "gt": self.gas_turbine, "wb": self.wood_boiler}[role]

    @property
    def horizon_fraction(self) -> float:
        return self.horizon * self.step / self.hours_per_year


@dataclass
class VariableMap:
    """Column indices of every role, per time step."""

    fuel: dict[str, np.ndarray]
    steam_dump: np.ndarray
    heat_curtail: np.ndarray
    grid_import: np.ndarray
    grid_export: np.ndarray
    charge: Optional[np.ndarray] = None
    discharge: Optional[np.ndarray] = None
    soc: Optional[np.ndarray] = None
    commitment: dict[str, np.ndarray] = field(default_factory=dict)
    rows: dict[str, object] = field(default_factory=dict)

    def roles(self) -> Iterator[tuple[str, np.ndarray]]:
        for key, arr in self.fuel.items():
            yield f"fuel_{key}", arr
        yield "steam_dump", self.steam_dump
        yield "heat_curtail", self.heat_curtail
        yield "grid_import", self.grid_import
        yield "grid_export", self.grid_export
        if self.charge is not None:
            yield "charge", self.charge
            yield "discharge", self.discharge
            yield "soc", self.soc
        for key, arr in self.commitment.items():
            yield f"commit_{key}", arr

    def index(self, role: str, t: int) -> int:
        return int(dict(self.roles())[role][t])

    def role_of(self, index: int) -> tuple[str, int]:
        for role, arr in self.roles():
            hit = np.flatnonzero(arr == index)
            if hit.size:
                return role, int(hit[0])
        raise KeyError(index)


@dataclass(frozen=True)
class ObjectiveExpressions:
    cost: dict  # column -> CHF per unit
    emissions: dict  # column -> t CO2-eq per unit


def _steam_cap_redundant(problem: DispatchProblem) -> bool:
    st = problem.steam_turbine
    max_steam = (problem.gas_turbine.eta_th * problem.gas_turbine.max_fuel_power
                 + problem.wood_boiler.eta_th * problem.wood_boiler.max_fuel_power)
    return st.eta_el * max_steam <= st.electric_capacity


def build_dispatch(problem: DispatchProblem) -> tuple[LinearProgram, VariableMap, ObjectiveExpressions]:
    if problem.requires_storage and problem.storage is None:
        raise ConfigError("scenario requires a storage unit but none is configured")
    H, dt = problem.horizon, problem.step
    lp = LinearProgram("dispatch")
    techs = {r: problem.tech(r) for r in TECH_ROLES}
    st = problem.steam_turbine

    def block(role, lower, upper, binary=False):
        return np.array([lp.add_variable(f"{role}[{t}]", lower, upper, binary=binary) for t in range(H)],
                        dtype=np.int64)

    fuel = {}
    for role, tech in techs.items():
        if tech.min_load_mode != "none" and tech.min_load_fraction > 0 and tech.capacity is None:
            raise ConfigError(f"{tech.name}: a minimum load needs a capacity")
        fuel[role] = block(f"fuel_{role}", 0.0, tech.max_fuel_power)
    dump = block("steam_dump", 0.0, INF if problem.allow_steam_dump else 0.0)
    curtail = block("heat_curtail", 0.0, INF)
    imp = block("grid_import", 0.0, problem.grid.import_capacity)
    exp = block("grid_export", 0.0, problem.grid.export_capacity)
    vmap = VariableMap(fuel, dump, curtail, imp, exp)
    storage = problem.storage
    if storage is not None:
        vmap.charge = block("charge", 0.0, storage.charge_power_cap)
        vmap.discharge = block("discharge", 0.0, storage.discharge_power_cap)
        vmap.soc = np.array([lp.add_variable(f"soc[{t}]", 0.0, storage.energy_capacity) for t in range(H + 1)],
                            dtype=np.int64)
        if not storage.cyclic:
            lp.set_bounds(int(vmap.soc[0]), storage.initial_soc, storage.initial_soc)
    for role, tech in techs.items():
        if tech.min_load_mode == "unit_commitment":
            vmap.commitment[role] = block(f"commit_{role}", 0.0, 1.0, binary=True)

    heat_d = problem.heat_demand.values
    el_d = problem.electricity_demand.values
    steam_techs = [r for r in TECH_ROLES if techs[r].thermal_output_carrier == "steam"]
    heat_techs = [r for r in TECH_ROLES if techs[r].thermal_output_carrier == "heat"]
    rows = {"heat_balance": [], "electricity_balance": [], "min_load": [], "steam_nonneg": [],
            "steam_cap": [], "storage": [], "cyclic": None, "fuel_cap": {}, "commit_min": [], "commit_max": []}
    steam_cap_row = not _steam_cap_redundant(problem)

    for t in range(H):
        steam = {int(fuel[r][t]): techs[r].eta_th for r in steam_techs}
        steam[int(dump[t])] = steam.get(int(dump[t]), 0.0) - 1.0

        heat = {int(fuel[r][t]): techs[r].eta_th for r in heat_techs}
        for j, a in steam.items():
            heat[j] = heat.get(j, 0.0) + st.eta_th * a
        heat[int(curtail[t])] = -1.0
        if storage is not None:
            heat[int(vmap.discharge[t])] = 1.0
            heat[int(vmap.charge[t])] = -1.0
        rows["heat_balance"].append(lp.add_constraint(heat, "=", heat_d[t], f"heat_balance[{t}]"))

        elec = {int(fuel[r][t]): techs[r].eta_el for r in TECH_ROLES if techs[r].eta_el > 0}
        for j, a in steam.items():
            elec[j] = elec.get(j, 0.0) + st.eta_el * a
        elec[int(imp[t])] = 1.0
        elec[int(exp[t])] = -1.0
        rows["electricity_balance"].append(lp.add_constraint(elec, "=", el_d[t], f"electricity_balance[{t}]"))

        for r, tech in techs.items():
            if tech.min_load_mode == "always_on" and tech.min_load_fraction > 0:
                rows["min_load"].append(lp.add_constraint(
                    {int(fuel[r][t]): tech.capacity_eta}, ">=", tech.min_load_fraction * tech.capacity,
                    f"min_load_{r}[{t}]"))
            elif tech.min_load_mode == "unit_commitment":
                u = int(vmap.commitment[r][t])
                f = int(fuel[r][t])
                rows["commit_min"].append(lp.add_constraint(
                    {f: tech.capacity_eta, u: -tech.min_load_fraction * tech.capacity}, ">=", 0.0,
                    f"commit_min_{r}[{t}]"))
                rows["commit_max"].append(lp.add_constraint(
                    {f: tech.capacity_eta, u: -tech.capacity}, "<=", 0.0, f"commit_max_{r}[{t}]"))

        if problem.allow_steam_dump:
            rows["steam_nonneg"].append(lp.add_constraint(steam, ">=", 0.0, f"steam_nonneg[{t}]"))
        if steam_cap_row:
            rows["steam_cap"].append(lp.add_constraint(
                {j: st.eta_el * a for j, a in steam.items()}, "<=", st.electric_capacity, f"steam_cap[{t}]"))

        if storage is not None:
            rows["storage"].append(lp.add_constraint({
                int(vmap.soc[t + 1]): 1.0,
                int(vmap.soc[t]): -(1.0 - storage.standing_loss_rate * dt),
                int(vmap.charge[t]): -dt * storage.charge_efficiency,
                int(vmap.discharge[t]): dt / storage.discharge_efficiency,
            }, "=", 0.0, f"soc_dynamics[{t}]"))
    if storage is not None and storage.cyclic:
        rows["cyclic"] = lp.add_constraint({int(vmap.soc[0]): 1.0, int(vmap.soc[H]): -1.0}, "=", 0.0, "soc_cyclic")

    by_fuel: dict[str, list[str]] = {}
    for r, tech in techs.items():
        by_fuel.setdefault(tech.fuel.name, []).append(r)
    for fname, roles in by_fuel.items():
        spec = techs[roles[0]].fuel
        cap = spec.annual_energy_cap
        if spec.cap_active and cap is not None:
            coeffs = {int(j): dt for r in roles for j in fuel[r]}
            rows["fuel_cap"][fname] = lp.add_constraint(
                coeffs, "<=", cap * problem.horizon_fraction, f"fuel_cap_{fname}")
    vmap.rows = rows

    cost: dict[int, float] = {}
    emis: dict[int, float] = {}
    for r, tech in techs.items():
        c = dt * tech.fuel.cost_per_mwh
        e = dt * tech.emissions_per_fuel_mwh
        for j in fuel[r]:
            if c:
                cost[int(j)] = c
            if e:
                emis[int(j)] = e
    grid = problem.grid
    for j in imp:
        if grid.import_price:
            cost[int(j)] = dt * grid.import_price
        if grid.import_intensity:
            emis[int(j)] = dt * grid.import_intensity
    for j in exp:
        if grid.export_price:
            cost[int(j)] = -dt * grid.export_price
    expressions = ObjectiveExpressions(cost, emis)
    lp.set_objective(cost)
    return lp, vmap, expressions


def set_objective(lp: LinearProgram, expressions: ObjectiveExpressions, objective: str) -> LinearProgram:
    if objective not in ("cost", "emissions"):
        raise DomainError(f"unknown objective {objective!r}")
    out = lp.copy()
    out.set_objective(expressions.cost if objective == "cost" else expressions.emissions)
    return out


def attach_epsilon(lp: LinearProgram, expressions: ObjectiveExpressions, epsilon: float) -> LinearProgram:
    """Copy of ``lp`` minimising cost subject to emissions <= epsilon (t CO2-eq)."""
    if not expressions.emissions:
        raise DomainError("emissions expression is empty")
    if math.isnan(epsilon) or epsilon < 0:
        raise DomainError(f"epsilon must be >= 0, got {epsilon}")
    out = lp.copy()
    if math.isfinite(epsilon):
        out.add_constraint(expressions.emissions, "<=", epsilon, "epsilon")
    out.set_objective(expressions.cost)
    return out


# -- solutions ----------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    kind: str
    timestep: Optional[int]
    message: str

    def __str__(self) -> str:
        where = "" if self.timestep is None else f" @t={self.timestep}"
        return f"{self.kind}{where}: {self.message}"


@dataclass
class DispatchSolution:
    """Per-step flows (MW, soc in MWh) and objective totals.

    ``heat`` and ``electricity`` hold the per-technology attribution used
    for reporting: ``wte`` (waste CHP), ``ccgt`` (gas turbine plus the
    steam-turbine share of its steam) and ``wood`` (wood boiler plus its
    steam-turbine share). Heat is net of curtailment, which is charged to
    the waste CHP first since it is the must-run unit.
    """

    step: float
    fuel: dict[str, np.ndarray]
    steam_dump: np.ndarray
    heat_curtail: np.ndarray
    grid_import: np.ndarray
    grid_export: np.ndarray
    charge: np.ndarray
    discharge: np.ndarray
    soc: np.ndarray
    commitment: dict[str, np.ndarray]
    cost: float
    emissions: float
    objective: str = "cost"
    heat: dict[str, np.ndarray] = field(default_factory=dict)
    electricity: dict[str, np.ndarray] = field(default_factory=dict)
    iterations: int = 0

    @property
    def horizon(self) -> int:
        return len(self.steam_dump)

    def heat_total(self, tech: str) -> float:
        return float(self.heat[tech].sum() * self.step)

    def electricity_total(self, tech: str) -> float:
        return float(self.electricity[tech].sum() * self.step)

    @property
    def curtailment_total(self) -> float:
        return float(self.heat_curtail.sum() * self.step)

    def flows(self, problem: DispatchProblem) -> Iterator[CarrierFlow]:
        names = {"wte": problem.wte.name, "gt": problem.gas_turbine.name, "wb": problem.wood_boiler.name}
        for t in range(self.horizon):
            for r in TECH_ROLES:
                carrier = _CARRIER_OF_FUEL.get(problem.tech(r).fuel.name, problem.tech(r).fuel.name)
                yield CarrierFlow(t, carrier, names[r], float(self.fuel[r][t]), "input")
            yield CarrierFlow(t, "steam", problem.steam_turbine.name, float(self.steam_in(problem)[t]), "input")
            yield CarrierFlow(t, "steam", "steam_dump", float(self.steam_dump[t]), "dump")
            for key in ("wte", "ccgt", "wood"):
                yield CarrierFlow(t, "heat", key, float(self.heat[key][t]), "output")
                yield CarrierFlow(t, "electricity", key, float(self.electricity[key][t]), "output")
            yield CarrierFlow(t, "heat", "curtailment", float(self.heat_curtail[t]), "curtail")
            yield CarrierFlow(t, "heat", "storage", float(self.charge[t]), "charge")
            yield CarrierFlow(t, "heat", "storage", float(self.discharge[t]), "discharge")
            yield CarrierFlow(t, "electricity", "grid", float(self.grid_import[t]), "import")
            yield CarrierFlow(t, "electricity", "grid", float(self.grid_export[t]), "export")

    def steam_in(self, problem: DispatchProblem) -> np.ndarray:
        return (problem.gas_turbine.eta_th * self.fuel["gt"] + problem.wood_boiler.eta_th * self.fuel["wb"]
                - self.steam_dump)


def _attribute(sol: DispatchSolution, problem: DispatchProblem) -> None:
    st = problem.steam_turbine
    gt_steam = problem.gas_turbine.eta_th * sol.fuel["gt"]
    wb_steam = problem.wood_boiler.eta_th * sol.fuel["wb"]
    gt_used = np.maximum(gt_steam - sol.steam_dump, 0.0)
    wb_used = np.maximum(wb_steam - np.maximum(sol.steam_dump - gt_steam, 0.0), 0.0)
    gen = {
        "wte": problem.wte.eta_th * sol.fuel["wte"],
        "ccgt": st.eta_th * gt_used,
        "wood": st.eta_th * wb_used,
    }
    remaining = sol.heat_curtail.copy()
    heat = {}
    for key in ("wte", "ccgt", "wood"):
        taken = np.minimum(remaining, gen[key])
        heat[key] = gen[key] - taken
        remaining = remaining - taken
    sol.heat = heat
    sol.electricity = {
        "wte": problem.wte.eta_el * sol.fuel["wte"],
        "ccgt": problem.gas_turbine.eta_el * sol.fuel["gt"] + st.eta_el * gt_used,
        "wood": problem.wood_boiler.eta_el * sol.fuel["wb"] + st.eta_el * wb_used,
    }


def recompute_objectives(sol: DispatchSolution, problem: DispatchProblem) -> tuple[float, float]:
    """Cost (CHF) and emissions (t) from the flows, via the scalar model-core functions."""
    dt = problem.step
    grid = problem.grid
    cost = 0.0
    emis = 0.0
    for r in TECH_ROLES:
        tech = problem.tech(r)
        for f in sol.fuel[r]:
            f = max(float(f), 0.0)
            cost += fuel_cost_rate(tech.fuel, f) * dt
            el, th = convert(tech, f)
            emis += emission_rate(tech, el, th) * dt
    cost += dt * (grid.import_price * float(sol.grid_import.sum()) - grid.export_price * float(sol.grid_export.sum()))
    emis += dt * grid.import_intensity * float(sol.grid_import.sum())
    return cost, emis


def extract_solution(raw: LpSolution, vmap: VariableMap, problem: DispatchProblem,
                     expressions: Optional[ObjectiveExpressions] = None,
                     objective: str = "cost") -> DispatchSolution:
    if raw.status != "optimal":
        raise DomainError(f"cannot extract a {raw.status} solution")
    x = raw.values
    H = problem.horizon
    zeros = np.zeros(H)

    def pick(idx):
        return None if idx is None else np.maximum(x[idx], 0.0)

    sol = DispatchSolution(
        step=problem.step,
        fuel={r: pick(vmap.fuel[r]) for r in TECH_ROLES},
        steam_dump=pick(vmap.steam_dump),
        heat_curtail=pick(vmap.heat_curtail),
        grid_import=pick(vmap.grid_import),
        grid_export=pick(vmap.grid_export),
        charge=zeros.copy() if vmap.charge is None else pick(vmap.charge),
        discharge=zeros.copy() if vmap.discharge is None else pick(vmap.discharge),
        soc=np.zeros(H + 1) if vmap.soc is None else pick(vmap.soc),
        commitment={r: np.round(x[idx]) for r, idx in vmap.commitment.items()},
        cost=math.nan,
        emissions=math.nan,
        objective=objective,
        iterations=raw.iterations,
    )
    _attribute(sol, problem)
    cost, emis = recompute_objectives(sol, problem)
    sol.cost, sol.emissions = cost, emis
    if expressions is not None:
        for label, expr, value in (("cost", expressions.cost, cost), ("emissions", expressions.emissions, emis)):
            terms = np.array([coef * x[j] for j, coef in expr.items()])
            lp_value = float(terms.sum())
            scale = max(1.0, float(np.abs(terms).sum()))
            if abs(lp_value - value) > 1e-6 * scale:
                raise ConsistencyError(
                    f"{label} recomputed from flows ({value}) disagrees with LP expression ({lp_value})")
        expr = expressions.cost if objective == "cost" else expressions.emissions
        lp_obj = float(sum(coef * x[j] for j, coef in expr.items()))
        if math.isfinite(raw.objective_value) and abs(lp_obj - raw.objective_value) > 1e-6 * max(1.0, abs(lp_obj)):
            raise ConsistencyError("LP objective does not match its own expression")
    return sol


def storage_closure(sol: DispatchSolution, problem: DispatchProblem) -> float:
    """Net energy balance of a cyclic store over the horizon (MWh); zero when closed."""
    s = problem.storage
    if s is None:
        return 0.0
    dt = problem.step
    return float(dt * np.sum(s.charge_efficiency * sol.charge - sol.discharge / s.discharge_efficiency
                             - s.standing_loss_rate * sol.soc[:-1]))


def validate_solution(solution: DispatchSolution, problem: DispatchProblem,
                      rel_tol: float = 1e-6, abs_tol: float = 1e-6) -> list[Violation]:
    """Recheck every physical constraint from the flows alone."""
    out: list[Violation] = []
    H, dt = problem.horizon, problem.step
    s = solution
    st = problem.steam_turbine

    def tol(ref):
        return np.maximum(abs_tol, rel_tol * np.maximum(1.0, np.abs(ref)))

    def flag(kind, mask, msg):
        for t in np.flatnonzero(mask):
            out.append(Violation(kind, int(t), msg))

    arrays = {f"fuel_{r}": s.fuel[r] for r in TECH_ROLES}
    arrays.update(steam_dump=s.steam_dump, heat_curtail=s.heat_curtail, grid_import=s.grid_import,
                  grid_export=s.grid_export, charge=s.charge, discharge=s.discharge)
    for name, arr in arrays.items():
        if len(arr) != H:
            out.append(Violation("shape", None, f"{name} has {len(arr)} steps, expected {H}"))
            return out
        flag("nonnegativity", arr < -abs_tol, f"{name} negative")

    for r in TECH_ROLES:
        tech = problem.tech(r)
        f = s.fuel[r]
        if tech.capacity is not None:
            out_basis = tech.capacity_eta * f
            flag("capacity", out_basis > tech.capacity + tol(tech.capacity), f"{tech.name} above capacity")
            if tech.min_load_mode == "always_on" and tech.min_load_fraction > 0:
                floor = tech.min_load_fraction * tech.capacity
                flag("min_load", out_basis < floor - tol(floor), f"{tech.name} below minimum load")
            elif tech.min_load_mode == "unit_commitment" and r in s.commitment:
                u = s.commitment[r]
                floor = tech.min_load_fraction * tech.capacity * u
                flag("min_load", out_basis < floor - tol(floor), f"{tech.name} below committed minimum load")
                flag("commitment", out_basis > tech.capacity * u + tol(tech.capacity),
                     f"{tech.name} produces while off")
    if not problem.allow_steam_dump:
        flag("steam_dump", s.steam_dump > abs_tol, "steam dump not allowed")
    steam_in = s.steam_in(problem)
    flag("steam", steam_in < -abs_tol, "steam dump exceeds steam production")
    flag("capacity", st.eta_el * steam_in > st.electric_capacity + tol(st.electric_capacity),
         f"{st.name} above capacity")
    flag("capacity", s.grid_import > problem.grid.import_capacity + abs_tol, "grid import above capacity")
    flag("capacity", s.grid_export > problem.grid.export_capacity + abs_tol, "grid export above capacity")

    heat_supply = (problem.wte.eta_th * s.fuel["wte"] + st.eta_th * steam_in + s.discharge - s.charge
                   - s.heat_curtail)
    d_heat = problem.heat_demand.values
    flag("heat_balance", np.abs(heat_supply - d_heat) > tol(d_heat), "heat balance violated")
    el_supply = (problem.wte.eta_el * s.fuel["wte"] + problem.gas_turbine.eta_el * s.fuel["gt"]
                 + problem.wood_boiler.eta_el * s.fuel["wb"] + st.eta_el * steam_in
                 + s.grid_import - s.grid_export)
    d_el = problem.electricity_demand.values
    flag("electricity_balance", np.abs(el_supply - d_el) > tol(d_el), "electricity balance violated")

    spec = problem.storage
    if spec is None:
        if np.any(s.charge > abs_tol) or np.any(s.discharge > abs_tol):
            out.append(Violation("storage", None, "storage flows without a storage unit"))
    else:
        flag("storage_power", s.charge > spec.charge_power_cap + tol(spec.charge_power_cap), "charge above cap")
        flag("storage_power", s.discharge > spec.discharge_power_cap + tol(spec.discharge_power_cap),
             "discharge above cap")
        soc = s.soc
        flag("storage_capacity", soc > spec.energy_capacity + tol(spec.energy_capacity), "soc above capacity")
        flag("storage_capacity", soc < -abs_tol, "soc negative")
        for t in range(H):
            expected = storage_step(soc[t], s.charge[t], s.discharge[t], spec, dt)
            if abs(soc[t + 1] - expected) > max(abs_tol, rel_tol * max(1.0, abs(expected))):
                out.append(Violation("storage_dynamics", t, f"soc {soc[t + 1]} != {expected}"))
        if spec.cyclic:
            if abs(soc[0] - soc[H]) > 1e-5:
                out.append(Violation("storage_cyclic", H, f"soc[0]={soc[0]} soc[H]={soc[H]}"))
        elif abs(soc[0] - spec.initial_soc) > abs_tol:
            out.append(Violation("storage_initial", 0, "initial soc mismatch"))

    by_fuel: dict[str, list[str]] = {}
    for r in TECH_ROLES:
        by_fuel.setdefault(problem.tech(r).fuel.name, []).append(r)
    for fname, roles in by_fuel.items():
        spec_f = problem.tech(roles[0]).fuel
        cap = spec_f.annual_energy_cap
        if spec_f.cap_active and cap is not None:
            used = dt * sum(float(s.fuel[r].sum()) for r in roles)
            limit = cap * problem.horizon_fraction
            if used > limit + tol(limit):
                out.append(Violation("fuel_cap", None, f"{fname}: {used:.3f} MWh > {limit:.3f} MWh"))
    return out

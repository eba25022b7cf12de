import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dhdispatch.core import FuelSpec, StorageSpec
from dhdispatch.errors import ConfigError, ConsistencyError, DataError, DomainError
from dhdispatch.formulation import (GridSpec, attach_epsilon, build_dispatch, extract_solution,
                                    recompute_objectives, set_objective, storage_closure,
                                    validate_solution)
from dhdispatch.lp import solve_lp
from dhdispatch.pareto import solve_single

from builders import WASTE, problem, two_tech_toy, wte

UNCAPPED = FuelSpec("waste", 3.3, cost_per_kg=-0.30)
STORE = StorageSpec(2000.0, 50.0, 50.0, 0.93, 0.93, 2e-5)


def solved(p, objective="cost"):
    lp, vmap, expr = build_dispatch(p)
    raw = solve_lp(set_objective(lp, expr, objective))
    return extract_solution(raw, vmap, p, expr, objective)


class TestBuild:
    def test_single_step_counts(self):
        lp, vmap, _ = build_dispatch(problem([30.0], wte_spec=wte(fuel=UNCAPPED), allow_steam_dump=False))
        assert lp.num_variables == 7
        assert len(lp.constraints) == 3
        assert [c.name for c in lp.constraints] == ["heat_balance[0]", "electricity_balance[0]", "min_load_wte[0]"]

    def test_steam_dump_adds_a_row(self):
        lp, _, _ = build_dispatch(problem([30.0], wte_spec=wte(fuel=UNCAPPED)))
        assert lp.num_variables == 7
        assert len(lp.constraints) == 4
        assert lp.constraints[-1].name == "steam_nonneg[0]"

    def test_storage_rows(self):
        lp, vmap, _ = build_dispatch(problem(np.full(24, 40.0), storage=STORE))
        names = [c.name for c in lp.constraints]
        assert sum(n.startswith("soc_dynamics") for n in names) == 24
        assert names.count("soc_cyclic") == 1
        assert len(vmap.soc) == 25

    def test_map_is_bijective(self):
        lp, vmap, _ = build_dispatch(problem(np.full(4, 40.0), storage=STORE))
        cols = np.concatenate([arr for _, arr in vmap.roles()])
        assert sorted(cols.tolist()) == list(range(lp.num_variables))
        assert vmap.role_of(vmap.index("discharge", 2)) == ("discharge", 2)

    def test_expressions_use_known_columns(self):
        lp, _, expr = build_dispatch(problem(np.full(3, 40.0)))
        for coeffs in (expr.cost, expr.emissions):
            assert max(coeffs) < lp.num_variables

    def test_missing_storage(self):
        with pytest.raises(ConfigError):
            build_dispatch(problem([30.0], requires_storage=True))

    def test_non_finite_demand(self):
        with pytest.raises(DataError):
            problem([30.0, math.nan])

    def test_profile_length(self):
        with pytest.raises(DataError):
            problem([30.0], electricity=[1.0, 2.0])

    def test_fuel_cap_scales_with_horizon(self):
        p = problem(np.full(24, 40.0))
        lp, vmap, _ = build_dispatch(p)
        row = lp.constraints[vmap.rows["fuel_cap"]["waste"]]
        assert_allclose(row.rhs, WASTE.annual_energy_cap * 24 / 8760)

    def test_infeasible_demand(self):
        p = problem([500.0], grid=GridSpec(export_capacity=0.0))
        lp, _, _ = build_dispatch(p)
        assert solve_lp(lp).status == "infeasible"


class TestAttachEpsilon:
    def test_infinite_epsilon_is_pure_cost(self):
        lp, _, expr = build_dispatch(two_tech_toy([10.0, 20.0]))
        free = solve_lp(attach_epsilon(lp, expr, math.inf))
        assert_allclose(free.objective_value, solve_lp(set_objective(lp, expr, "cost")).objective_value)

    def test_negative_epsilon(self):
        lp, _, expr = build_dispatch(two_tech_toy([10.0]))
        with pytest.raises(DomainError):
            attach_epsilon(lp, expr, -1.0)

    def test_epsilon_at_emissions_optimum(self):
        p = two_tech_toy([10.0, 20.0])
        lp, vmap, expr = build_dispatch(p)
        low = solve_single(p, "emissions")
        raw = solve_lp(attach_epsilon(lp, expr, low.emissions * (1 + 1e-9)))
        assert raw.status == "optimal"
        assert_allclose(raw.objective_value, low.cost, rtol=1e-6)

    def test_interior_epsilon_on_two_steps(self):
        # gas heat costs 100/(0.53*0.7) CHF/MWh, wood heat 200/(0.86*0.7)
        p = two_tech_toy([10.0, 20.0])
        lp, _, expr = build_dispatch(p)
        gas_heat_cost = 100 / (0.53 * 0.7)
        wood_heat_cost = 200 / (0.86 * 0.7)
        gas_heat_em = 0.760 * 0.35 / (0.53 * 0.7)
        wood_heat_em = 0.027 / 0.7
        mid = 15 * gas_heat_em + 15 * wood_heat_em
        raw = solve_lp(attach_epsilon(lp, expr, mid))
        assert_allclose(raw.objective_value, 15 * gas_heat_cost + 15 * wood_heat_cost, rtol=1e-9)
        assert 30 * gas_heat_cost < raw.objective_value < 30 * wood_heat_cost

    def test_input_untouched(self):
        lp, _, expr = build_dispatch(two_tech_toy([10.0]))
        n = len(lp.constraints)
        attach_epsilon(lp, expr, 5.0)
        assert len(lp.constraints) == n


class TestExtract:
    def test_zero_demand_runs_wte_at_minimum(self):
        p = problem([0.0], grid=GridSpec(export_price=0.0))
        sol = solved(p, "emissions")
        assert_allclose(sol.fuel["wte"], [40.0])  # 8 MW_el at eta_el 0.2
        assert_allclose(sol.fuel["gt"], [0.0], atol=1e-12)
        assert_allclose(sol.fuel["wb"], [0.0], atol=1e-12)
        assert_allclose(sol.heat_curtail, [18.0])
        assert_allclose(sol.cost, 40.0 * WASTE.cost_per_mwh)

    def test_demand_at_wte_minimum(self):
        sol = solved(problem([18.0]), "emissions")
        assert_allclose(sol.heat_curtail, [0.0], atol=1e-9)

    def test_objectives_match_lp(self):
        p = problem(np.linspace(20, 90, 6), electricity=np.full(6, 30.0), storage=STORE)
        lp, vmap, expr = build_dispatch(p)
        raw = solve_lp(lp)
        sol = extract_solution(raw, vmap, p, expr)
        lp_em = sum(c * raw.values[j] for j, c in expr.emissions.items())
        assert_allclose(sol.emissions, lp_em, rtol=1e-6)
        assert_allclose(sol.cost, raw.objective_value, rtol=1e-6)

    def test_non_optimal(self):
        p = problem([500.0], grid=GridSpec(export_capacity=0.0))
        lp, vmap, expr = build_dispatch(p)
        with pytest.raises(DomainError):
            extract_solution(solve_lp(lp), vmap, p, expr)

    def test_tampered_expression(self):
        p = problem([30.0])
        lp, vmap, expr = build_dispatch(p)
        raw = solve_lp(lp)
        bad = type(expr)({j: 2 * c for j, c in expr.cost.items()}, expr.emissions)
        with pytest.raises(ConsistencyError):
            extract_solution(raw, vmap, p, bad)

    def test_attribution_adds_up(self):
        p = problem(np.linspace(20, 90, 6), electricity=np.full(6, 30.0))
        sol = solved(p)
        total = sum(sol.heat[k] for k in ("wte", "ccgt", "wood"))
        assert_allclose(total, p.heat_demand.values, rtol=1e-9)


class TestValidate:
    def setup_method(self):
        self.p = problem(np.array([30.0, 80.0, 60.0, 20.0]), electricity=np.full(4, 25.0), storage=STORE)
        self.sol = solved(self.p)

    def test_clean_solution(self):
        assert validate_solution(self.sol, self.p) == []

    def test_perturbed_import(self):
        self.sol.grid_import = self.sol.grid_import.copy()
        self.sol.grid_import[2] += 1.0
        bad = validate_solution(self.sol, self.p)
        assert [(v.kind, v.timestep) for v in bad] == [("electricity_balance", 2)]

    def test_perturbed_discharge(self):
        self.sol.discharge = self.sol.discharge.copy()
        self.sol.discharge[1] += 1.0
        kinds = {(v.kind, v.timestep) for v in validate_solution(self.sol, self.p)}
        assert ("heat_balance", 1) in kinds
        assert ("storage_dynamics", 1) in kinds
        assert all(k in ("heat_balance", "storage_dynamics") for k, _ in kinds)

    def test_soc_above_capacity(self):
        self.sol.soc = self.sol.soc.copy()
        self.sol.soc[3] = STORE.energy_capacity + 10.0
        bad = [v for v in validate_solution(self.sol, self.p) if v.kind == "storage_capacity"]
        assert [v.timestep for v in bad] == [3]

    def test_violation_text(self):
        self.sol.grid_import = self.sol.grid_import + 1.0
        assert str(validate_solution(self.sol, self.p)[0]).startswith("electricity_balance @t=0")


class TestProperties:
    def test_cyclic_closure(self):
        heat = 60 + 40 * np.sin(np.linspace(0, 2 * np.pi, 48))
        p = problem(heat, electricity=np.full(48, 20.0), storage=STORE)
        sol = solved(p, "emissions")
        assert abs(storage_closure(sol, p)) < 1e-5
        assert abs(sol.soc[0] - sol.soc[-1]) < 1e-5

    def test_curtailment_only_when_store_saturated(self):
        # low summer demand: the must-run waste CHP overproduces
        heat = np.concatenate([np.full(12, 5.0), np.full(12, 90.0)])
        small = StorageSpec(100.0, 10.0, 10.0, 0.93, 0.93, 2e-5)
        p = problem(heat, storage=small)
        sol = solved(p, "emissions")
        curtailed = np.flatnonzero(sol.heat_curtail > 1e-7)
        assert curtailed.size
        # Standing losses make it optimal to charge as late as possible, so a
        # curtailed step need not itself be saturated; the store must then fill
        # up before it next discharges.
        for t in curtailed:
            if sol.charge[t] >= small.charge_power_cap - 1e-6:
                continue
            later = range(t, p.horizon)
            stop = next((s for s in later if sol.discharge[s] > 1e-7), p.horizon)
            assert sol.soc[t + 1:stop + 1].max() >= small.energy_capacity - 1e-6, t

    def test_unit_commitment_allows_shutdown(self):
        on = solved(problem([5.0, 5.0]), "emissions")
        uc = problem([5.0, 5.0], wte_spec=wte("unit_commitment"))
        lp, vmap, expr = build_dispatch(uc)
        assert lp.binaries
        off = solve_single(uc, "emissions")
        assert off.emissions <= on.emissions
        assert validate_solution(off, uc) == []

    def test_recompute_is_independent_of_lp(self):
        p = problem(np.full(3, 50.0), electricity=np.full(3, 10.0))
        sol = solved(p)
        sol.cost = sol.emissions = math.nan
        cost, em = recompute_objectives(sol, p)
        assert math.isfinite(cost) and em > 0

    def test_epsilon_monotone(self):
        p = two_tech_toy([10.0, 25.0, 15.0])
        lp, _, expr = build_dispatch(p)
        lo = solve_single(p, "emissions").emissions
        hi = solve_single(p, "cost").emissions
        costs = [solve_lp(attach_epsilon(lp, expr, e)).objective_value for e in np.linspace(lo, hi, 6)]
        assert np.all(np.diff(costs) <= 1e-9)

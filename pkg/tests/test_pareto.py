import itertools
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dhdispatch.core import FuelSpec
from dhdispatch.errors import DomainError, InfeasibleError
from dhdispatch.formulation import GridSpec, validate_solution
from dhdispatch.pareto import (ParetoPoint, dominance_filter, front_is_consistent, pareto_front,
                               solve_single)

from builders import problem, two_tech_toy

# per MWh of delivered heat, from the toy's efficiencies and prices
GAS_COST = 100 / (0.53 * 0.7)
WOOD_COST = 200 / (0.86 * 0.7)
GAS_EM = 0.760 * 0.35 / (0.53 * 0.7)
WOOD_EM = 0.027 / 0.7
WOOD_HEAT_CAP = 32 * 0.7


def pt(cost, em, eps=0.0, k=0):
    return ParetoPoint(eps, cost, em, None, k)


def grid_oracle(heat, epsilons, resolution=0.25):
    """Cheapest cost under each epsilon over a lattice of per-step wood shares."""
    axes = [np.arange(0.0, min(d, WOOD_HEAT_CAP) + 1e-9, resolution) for d in heat]
    wood = np.array(list(itertools.product(*axes)))
    gas = np.asarray(heat) - wood
    cost = (gas * GAS_COST + wood * WOOD_COST).sum(axis=1)
    em = (gas * GAS_EM + wood * WOOD_EM).sum(axis=1)
    # points may sit 1e-6 relative above their epsilon
    return [float(cost[em <= e * (1 + 1e-6)].min()) for e in epsilons]


class TestDominanceFilter:
    def test_equal_emissions(self):
        kept = dominance_filter([pt(10, 5, 0, 0), pt(11, 5, 1, 1)])
        assert [p.cost for p in kept] == [10]

    def test_single_point(self):
        assert len(dominance_filter([pt(1, 1)])) == 1

    def test_chain_unchanged(self):
        chain = [pt(4, 1, 1, 0), pt(3, 2, 2, 1), pt(2, 3, 3, 2), pt(1, 4, 4, 3)]
        assert [p.solution_id for p in dominance_filter(chain[::-1])] == [0, 1, 2, 3]

    def test_duplicate_keeps_lowest_epsilon(self):
        kept = dominance_filter([pt(5, 5, eps=9, k=1), pt(5, 5, eps=7, k=2)])
        assert [p.epsilon for p in kept] == [7]


class TestSolveSingle:
    def test_free_clean_unit_serves_everything(self):
        toy = two_tech_toy([10.0, 20.0])
        free = FuelSpec("wood", cost_per_kwh=0.0)
        p = replace(toy, wood_boiler=replace(toy.wood_boiler, fuel=free, emission_intensity=0.0))
        for objective in ("cost", "emissions"):
            sol = solve_single(p, objective)
            assert_allclose(sol.fuel["gt"], 0.0, atol=1e-9)
            assert_allclose(sol.heat["wood"], [10.0, 20.0], rtol=1e-9)

    def test_cheap_dirty_gas_on_the_margin(self):
        p = two_tech_toy([10.0, 20.0])
        cheap = solve_single(p, "cost")
        clean = solve_single(p, "emissions")
        assert_allclose(cheap.heat["ccgt"], [10.0, 20.0], rtol=1e-9)
        assert_allclose(cheap.cost, 30 * GAS_COST, rtol=1e-9)
        assert cheap.emissions > clean.emissions
        assert_allclose(clean.emissions, 30 * WOOD_EM, rtol=1e-9)

    def test_unknown_objective(self):
        with pytest.raises(DomainError):
            solve_single(two_tech_toy([1.0]), "profit")

    def test_infeasible(self):
        with pytest.raises(InfeasibleError):
            solve_single(problem([500.0], grid=GridSpec(export_capacity=0.0)))


class TestParetoFront:
    heat = [10.0, 20.0, 15.0]

    def test_two_points_are_the_endpoints(self):
        front = pareto_front(two_tech_toy(self.heat), 2)
        assert len(front.raw) == 2
        assert front.points[0].solution is front.emissions_optimal
        assert front.points[-1].solution is front.cost_optimal

    def test_endpoint_consistency(self):
        p = two_tech_toy(self.heat)
        front = pareto_front(p, 3)
        assert_allclose(front.emissions[0], solve_single(p, "emissions").emissions, rtol=1e-6)
        assert_allclose(front.costs[-1], solve_single(p, "cost").cost, rtol=1e-6)
        assert front_is_consistent(front) == []

    def test_matches_grid_oracle(self):
        front = pareto_front(two_tech_toy(self.heat), 5)
        assert len(front) == 5
        eps = [p.epsilon for p in front.points]
        assert_allclose(front.costs, grid_oracle(self.heat, eps), rtol=1e-4)
        assert_allclose(front.emissions[[0, -1]], [45 * WOOD_EM, 45 * GAS_EM], rtol=1e-6)

    def test_every_point_is_valid(self):
        p = two_tech_toy(self.heat)
        for point in pareto_front(p, 4).points:
            assert validate_solution(point.solution, p) == []
            assert point.emissions <= point.epsilon * (1 + 1e-6)

    def test_warm_start_is_transparent(self):
        p = two_tech_toy(self.heat)
        warm = pareto_front(p, 6, warm_start=True)
        cold = pareto_front(p, 6, warm_start=False)
        assert_allclose(warm.costs, cold.costs, rtol=1e-9)
        assert_allclose(warm.emissions, cold.emissions, rtol=1e-9)

    def test_workers_give_same_front(self):
        p = two_tech_toy(self.heat)
        assert pareto_front(p, 5, workers=3).to_csv() == pareto_front(p, 5).to_csv()

    def test_raw_cost_monotone_in_epsilon(self):
        front = pareto_front(two_tech_toy(self.heat), 7)
        raw = sorted(front.raw, key=lambda q: q.epsilon)
        assert np.all(np.diff([q.cost for q in raw]) <= 1e-9)

    def test_shared_epsilons(self):
        p = two_tech_toy(self.heat)
        base = pareto_front(p, 3)
        again = pareto_front(p, epsilons=[q.epsilon for q in base.raw])
        assert_allclose(again.costs, base.costs, rtol=1e-9)

    def test_epsilon_below_minimum(self):
        with pytest.raises(InfeasibleError):
            pareto_front(two_tech_toy(self.heat), epsilons=[0.0])

    def test_too_few_points(self):
        with pytest.raises(DomainError):
            pareto_front(two_tech_toy(self.heat), 1)

    def test_csv(self):
        lines = pareto_front(two_tech_toy(self.heat), 3).to_csv().splitlines()
        assert lines[0] == "epsilon_tco2,cost_chf,emissions_tco2,solution_id"
        assert len(lines) == 4
        em = [float(line.split(",")[2]) for line in lines[1:]]
        assert em == sorted(em)

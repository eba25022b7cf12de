"""Single-objective solves and epsilon-constraint Pareto sweeps."""
from __future__ import annotations

import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConsistencyError, DomainError, InfeasibleError, SolverError
from .formulation import (DispatchProblem, DispatchSolution, ObjectiveExpressions, VariableMap,
                          attach_epsilon, build_dispatch, extract_solution, set_objective,
                          validate_solution)
from .lp import LinearProgram, LpSolution, SimplexOptions, solve_lp, solve_milp

# Slack added to every epsilon row so the emissions-optimal level stays
# feasible after floating-point round-off in the LP.
EPSILON_SLACK = 1e-9


@dataclass
class ParetoPoint:
    epsilon: float  # t CO2-eq
    cost: float  # CHF
    emissions: float  # t CO2-eq
    solution: DispatchSolution
    solution_id: int = 0


@dataclass
class ParetoFront:
    points: list[ParetoPoint]
    cost_optimal: DispatchSolution
    emissions_optimal: DispatchSolution
    raw: list[ParetoPoint] = field(default_factory=list)  # sweep results before filtering

    def __len__(self) -> int:
        return len(self.points)

    @property
    def costs(self) -> np.ndarray:
        return np.array([p.cost for p in self.points])

    @property
    def emissions(self) -> np.ndarray:
        return np.array([p.emissions for p in self.points])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("epsilon_tco2,cost_chf,emissions_tco2,solution_id\n")
        for p in self.points:
            buf.write(f"{p.epsilon:.6f},{p.cost:.6f},{p.emissions:.6f},{p.solution_id}\n")
        return buf.getvalue()


def _solve(lp: LinearProgram, warm_start=None, options: Optional[SimplexOptions] = None) -> LpSolution:
    if lp.binaries:
        return solve_milp(lp, options=options)
    return solve_lp(lp, warm_start=warm_start, options=options)


def _finish(raw: LpSolution, vmap: VariableMap, problem: DispatchProblem,
            expressions: ObjectiveExpressions, objective: str, context: str,
            minimised: Optional[str] = None) -> DispatchSolution:
    """Extract and validate; ``minimised`` names the LP objective when it differs from the label."""
    if raw.status == "infeasible":
        raise InfeasibleError(f"{context}: dispatch problem is infeasible")
    if raw.status != "optimal":
        raise SolverError(f"{context}: solver returned {raw.status}", diagnostics={"status": raw.status})
    sol = extract_solution(raw, vmap, problem, expressions, minimised or objective)
    sol.objective = objective
    bad = validate_solution(sol, problem)
    if bad:
        raise ConsistencyError(f"{context}: solution fails validation: " + "; ".join(map(str, bad[:5])))
    return sol


def solve_single(problem: DispatchProblem, objective: str = "cost", *,
                 options: Optional[SimplexOptions] = None, context: str = "dispatch") -> DispatchSolution:
    """Optimal dispatch for one objective; the other objective is reported alongside."""
    if objective not in ("cost", "emissions"):
        raise DomainError(f"unknown objective {objective!r}")
    lp, vmap, expr = build_dispatch(problem)
    raw = _solve(set_objective(lp, expr, objective), options=options)
    return _finish(raw, vmap, problem, expr, objective, f"{context} ({objective}-optimal)")


def dominance_filter(points: Sequence[ParetoPoint], rel_tol: float = 1e-9) -> list[ParetoPoint]:
    """Points not weakly dominated in (cost, emissions), sorted by emissions.

    Payoff-identical points (within ``rel_tol``) collapse onto the one with the
    lowest epsilon.
    """
    def le(a, b):
        return a <= b + rel_tol * max(1.0, abs(a), abs(b))

    def same(a, b):
        return le(a, b) and le(b, a)

    ordered = sorted(points, key=lambda p: (p.epsilon, p.solution_id))
    kept: list[ParetoPoint] = []
    for i, p in enumerate(ordered):
        dominated = False
        for j, q in enumerate(ordered):
            if i == j:
                continue
            if same(q.cost, p.cost) and same(q.emissions, p.emissions):
                if j < i:
                    dominated = True
                    break
                continue
            if le(q.cost, p.cost) and le(q.emissions, p.emissions):
                dominated = True
                break
        if not dominated:
            kept.append(p)
    return sorted(kept, key=lambda p: (p.emissions, p.cost))


def _lexicographic(lp: LinearProgram, expr: ObjectiveExpressions, primary: str,
                   options) -> tuple[LpSolution, LpSolution, str]:
    """Optimise ``primary``, then the other objective with ``primary`` held at its optimum.

    Returns the first solve, the refined solve and the objective the latter minimised.
    """
    first = _solve(set_objective(lp, expr, primary), options=options)
    if first.status != "optimal":
        return first, first, primary
    secondary = "emissions" if primary == "cost" else "cost"
    bound = first.objective_value + EPSILON_SLACK * max(1.0, abs(first.objective_value))
    refined = lp.copy()
    refined.add_constraint(getattr(expr, primary), "<=", bound, f"{primary}_cap")
    refined.set_objective(getattr(expr, secondary))
    second = _solve(refined, warm_start=first.basis, options=options)
    if second.status != "optimal":
        return first, first, primary
    return first, second, secondary


def pareto_front(problem: DispatchProblem, n_points: int = 11, *, warm_start: bool = True,
                 workers: int = 1, epsilons: Optional[Sequence[float]] = None,
                 options: Optional[SimplexOptions] = None, context: str = "dispatch") -> ParetoFront:
    """Epsilon-constraint sweep between the two single-objective optima.

    The endpoints are solved lexicographically (emissions then cost, and cost
    then emissions) so neither is weakly dominated. ``n_points`` epsilons are
    spaced linearly over [E_min, E_max] inclusive and cost is minimised under
    each. ``epsilons`` overrides the grid, e.g. to evaluate another scenario
    at shared levels; values below E_min are rejected as infeasible.
    """
    if epsilons is None and n_points < 2:
        raise DomainError("n_points must be >= 2")
    lp, vmap, expr = build_dispatch(problem)

    e_first, e_raw, e_obj = _lexicographic(lp, expr, "emissions", options)
    if e_first.status == "infeasible":
        raise InfeasibleError(f"{context}: dispatch problem is infeasible")
    emis_opt = _finish(e_raw, vmap, problem, expr, "emissions", f"{context} (emissions-optimal)", e_obj)
    c_first, c_raw, c_obj = _lexicographic(lp, expr, "cost", options)
    cost_opt = _finish(c_raw, vmap, problem, expr, "cost", f"{context} (cost-optimal)", c_obj)
    e_min = emis_opt.emissions
    e_max = max(cost_opt.emissions, e_min)

    if epsilons is None:
        grid = list(np.linspace(e_min, e_max, n_points))
        grid[0], grid[-1] = e_min, e_max
    else:
        grid = [float(e) for e in epsilons]
        low = [e for e in grid if e < e_min - EPSILON_SLACK * max(1.0, e_min)]
        if low:
            raise InfeasibleError(f"{context}: epsilon {min(low)} below the minimum emissions {e_min}")

    # Endpoints double as the solutions at E_min and (any epsilon >=) E_max.
    results: dict[int, DispatchSolution] = {}
    interior = []
    for k, eps in enumerate(grid):
        if epsilons is None and k == 0:
            results[k] = emis_opt
        elif eps >= e_max:
            results[k] = cost_opt
        else:
            interior.append(k)

    def solve_at(k: int, basis) -> tuple[DispatchSolution, tuple]:
        eps = grid[k]
        model = attach_epsilon(lp, expr, eps + EPSILON_SLACK * max(1.0, abs(eps)))
        raw = _solve(model, warm_start=basis if warm_start else None, options=options)
        if raw.status != "optimal":
            raise ConsistencyError(
                f"{context}: epsilon {eps} returned {raw.status} although both endpoints are feasible")
        return _finish(raw, vmap, problem, expr, "cost", f"{context} (epsilon {eps:.6g})"), raw.basis

    if workers <= 1:
        # Walk from the cost-optimal end downwards, chaining bases.
        basis = c_first.basis
        for k in sorted(interior, key=lambda k: -grid[k]):
            results[k], basis = solve_at(k, basis)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {k: pool.submit(solve_at, k, c_first.basis) for k in interior}
            for k in interior:
                results[k] = futures[k].result()[0]

    raw_points = [ParetoPoint(grid[k], results[k].cost, results[k].emissions, results[k], k)
                  for k in range(len(grid))]
    for p in raw_points:
        if p.emissions > p.epsilon + 1e-6 * max(1.0, abs(p.epsilon)):
            raise ConsistencyError(f"{context}: point at epsilon {p.epsilon} emits {p.emissions}")
    return ParetoFront(dominance_filter(raw_points), cost_opt, emis_opt, raw_points)


def front_is_consistent(front: ParetoFront, rel_tol: float = 1e-6) -> list[str]:
    """Breaches of the front invariants (empty when the front is well formed)."""
    out = []
    pts = front.points
    for a, b in zip(pts, pts[1:]):
        if not b.emissions > a.emissions:
            out.append(f"emissions not increasing: {a.emissions} -> {b.emissions}")
        if not b.cost < a.cost:
            out.append(f"cost not decreasing: {a.cost} -> {b.cost}")
    c_min = front.cost_optimal.cost
    e_min = front.emissions_optimal.emissions
    for p in pts:
        if p.cost < c_min - rel_tol * max(1.0, abs(c_min)):
            out.append(f"point below cost-optimal endpoint: {p.cost} < {c_min}")
        if p.emissions < e_min - rel_tol * max(1.0, abs(e_min)):
            out.append(f"point below emissions-optimal endpoint: {p.emissions} < {e_min}")
    return out


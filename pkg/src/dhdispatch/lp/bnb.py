"""Best-bound branch-and-bound over binary variables."""
from __future__ import annotations

import heapq
import itertools
import math
from typing import Optional

import numpy as np

from ..errors import ResourceError
from .program import LinearProgram, LpSolution
from .simplex import SimplexOptions, solve_lp

INTEGRALITY_TOL = 1e-6


def _most_fractional(values: np.ndarray, binaries: np.ndarray) -> int:
    """Index of the binary closest to 0.5, lowest index on ties; -1 if integral."""
    if binaries.size == 0:
        return -1
    v = values[binaries]
    frac = np.minimum(v - np.floor(v), np.ceil(v) - v)
    k = int(np.argmax(frac))
    if frac[k] <= INTEGRALITY_TOL:
        return -1
    return int(binaries[k])


def solve_milp(lp: LinearProgram, *, node_limit: int = 100_000,
               options: Optional[SimplexOptions] = None,
               gap_tol: float = 1e-9) -> LpSolution:
    """Optimal solution with every declared binary at 0 or 1.

    Nodes are explored best-bound first (ties in creation order); the
    branching variable is the most fractional binary. A node is pruned once
    its relaxation bound is within ``gap_tol`` (relative) of the incumbent.
    """
    binaries = np.array(sorted(lp.binaries), dtype=np.int64)
    base_lo = np.array(lp.lower, dtype=float)
    base_up = np.array(lp.upper, dtype=float)
    if binaries.size:
        base_lo[binaries] = np.ceil(base_lo[binaries] - INTEGRALITY_TOL)
        base_up[binaries] = np.floor(base_up[binaries] + INTEGRALITY_TOL)

    root = solve_lp(lp, options=options, lower=base_lo, upper=base_up)
    total_iterations = root.iterations
    if root.status != "optimal" or binaries.size == 0:
        root.is_mip = True
        return root

    counter = itertools.count()
    # (bound, seq, lower-overrides, upper-overrides, parent basis)
    heap = [(root.objective_value, next(counter), {}, {}, root.basis, root)]
    incumbent: Optional[LpSolution] = None
    nodes = 0

    def prunable(bound: float) -> bool:
        if incumbent is None:
            return False
        inc = incumbent.objective_value
        return bound >= inc - gap_tol * max(1.0, abs(inc))

    while heap:
        bound, _, fix_lo, fix_up, basis, presolved = heapq.heappop(heap)
        if prunable(bound):
            continue
        nodes += 1
        if nodes > node_limit:
            raise ResourceError(
                f"node limit {node_limit} exceeded",
                incumbent=incumbent,
                bound=min(bound, heap[0][0]) if heap else bound)
        if presolved is not None:
            sol = presolved
        else:
            lo = base_lo.copy()
            up = base_up.copy()
            for j, v in fix_lo.items():
                lo[j] = v
            for j, v in fix_up.items():
                up[j] = v
            sol = solve_lp(lp, warm_start=basis, options=options, lower=lo, upper=up)
            total_iterations += sol.iterations
        if sol.status == "infeasible":
            continue
        if sol.status == "unbounded":
            sol.is_mip = True
            sol.nodes = nodes
            return sol
        if prunable(sol.objective_value):
            continue
        j = _most_fractional(sol.values, binaries)
        if j < 0:
            incumbent = _polish(lp, sol, binaries, base_lo, base_up, options)
            total_iterations += incumbent.iterations
            continue
        for value in (0.0, 1.0):
            child_lo = dict(fix_lo)
            child_up = dict(fix_up)
            child_lo[j] = value
            child_up[j] = value
            heapq.heappush(heap, (sol.objective_value, next(counter), child_lo, child_up, sol.basis, None))

    if incumbent is None:
        return LpSolution("infeasible", np.full(lp.num_variables, np.nan), math.nan,
                          total_iterations, is_mip=True, nodes=nodes)
    incumbent.iterations = total_iterations
    incumbent.nodes = nodes
    return incumbent


def _polish(lp, sol, binaries, base_lo, base_up, options) -> LpSolution:
    """Re-solve with binaries pinned to their rounded values so they come out exact."""
    lo = base_lo.copy()
    up = base_up.copy()
    rounded = np.round(sol.values[binaries])
    lo[binaries] = rounded
    up[binaries] = rounded
    fixed = solve_lp(lp, warm_start=sol.basis, options=options, lower=lo, upper=up)
    if fixed.status != "optimal":
        fixed = sol
        fixed.values = sol.values.copy()
        fixed.values[binaries] = rounded
    fixed.is_mip = True
    fixed.duals = None
    fixed.reduced_costs = None
    return fixed

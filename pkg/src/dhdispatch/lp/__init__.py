"""Embedded LP/MILP solver."""
from .program import INF, Constraint, LinearProgram, LpSolution
from .simplex import SimplexOptions, dual_values, solve_lp
from .bnb import solve_milp

__all__ = ["INF", "Constraint", "LinearProgram", "LpSolution", "SimplexOptions",
           "dual_values", "solve_lp", "solve_milp", "add_variable"]


def add_variable(lp: LinearProgram, name: str, lower: float = 0.0, upper: float = INF) -> int:
    return lp.add_variable(name, lower, upper)

"""Linear program container and its plain-text debug export."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp

from ..errors import DomainError

INF = math.inf
SENSES = ("<=", "=", ">=")

Coefficients = Union[Mapping[int, float], Iterable[tuple[int, float]]]


@dataclass
class Constraint:
    indices: np.ndarray
    values: np.ndarray
    sense: str
    rhs: float
    name: str


class LinearProgram:
    """Minimization problem ``min c x  s.t.  A x (<=,=,>=) b,  l <= x <= u``.

    Variables get dense indices in insertion order. Variables listed in
    ``binaries`` are restricted to {0, 1} by :func:`solve_milp` and
    relaxed by :func:`solve_lp`.
    """

    def __init__(self, name: str = "lp"):
        self.name = name
        self.names: list[str] = []
        self.lower: list[float] = []
        self.upper: list[float] = []
        self.constraints: list[Constraint] = []
        self.objective: dict[int, float] = {}
        self.binaries: set[int] = set()
        self._index: dict[str, int] = {}

    @property
    def num_variables(self) -> int:
        return len(self.names)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def index(self, name: str) -> int:
        return self._index[name]

    def add_variable(self, name: str, lower: float = 0.0, upper: float = INF, binary: bool = False) -> int:
        if name in self._index:
            raise DomainError(f"duplicate variable name {name!r}")
        lower = float(lower)
        upper = float(upper)
        if math.isnan(lower) or math.isnan(upper) or math.isinf(lower) and lower > 0:
            raise DomainError(f"invalid bounds for {name!r}: [{lower}, {upper}]")
        if lower > upper:
            raise DomainError(f"inverted bounds for {name!r}: [{lower}, {upper}]")
        if binary and (lower < 0 or upper > 1):
            raise DomainError(f"binary variable {name!r} must have bounds within [0, 1]")
        idx = len(self.names)
        self.names.append(name)
        self.lower.append(lower)
        self.upper.append(upper)
        self._index[name] = idx
        if binary:
            self.binaries.add(idx)
        return idx

    def set_bounds(self, index: int, lower: float, upper: float) -> None:
        if lower > upper:
            raise DomainError(f"inverted bounds for {self.names[index]!r}")
        self.lower[index] = float(lower)
        self.upper[index] = float(upper)

    def add_constraint(self, coefficients: Coefficients, sense: str, rhs: float,
                       name: Optional[str] = None) -> int:
        if sense not in SENSES:
            raise DomainError(f"unknown constraint sense {sense!r}")
        rhs = float(rhs)
        if not math.isfinite(rhs):
            raise DomainError("constraint right-hand side must be finite")
        idx, vals = _as_sparse(coefficients, self.num_variables)
        row = len(self.constraints)
        self.constraints.append(Constraint(idx, vals, sense, rhs, name or f"c{row}"))
        return row

    def set_objective(self, coefficients: Coefficients) -> None:
        idx, vals = _as_sparse(coefficients, self.num_variables)
        self.objective = {int(i): float(v) for i, v in zip(idx, vals)}

    def copy(self) -> "LinearProgram":
        other = LinearProgram(self.name)
        other.names = list(self.names)
        other.lower = list(self.lower)
        other.upper = list(self.upper)
        other.constraints = list(self.constraints)  # rows are never mutated in place
        other.objective = dict(self.objective)
        other.binaries = set(self.binaries)
        other._index = dict(self._index)
        return other

    # -- array views used by the solvers --------------------------------

    def matrix(self) -> sp.csr_matrix:
        m, n = self.num_constraints, self.num_variables
        counts = [len(c.indices) for c in self.constraints]
        indptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        if m:
            indices = np.concatenate([c.indices for c in self.constraints]) if indptr[-1] else np.zeros(0, np.int64)
            data = np.concatenate([c.values for c in self.constraints]) if indptr[-1] else np.zeros(0)
        else:
            indices, data = np.zeros(0, np.int64), np.zeros(0)
        return sp.csr_matrix((data, indices, indptr), shape=(m, n))

    def cost_vector(self) -> np.ndarray:
        c = np.zeros(self.num_variables)
        for i, v in self.objective.items():
            c[i] = v
        return c

    def evaluate(self, coefficients: Mapping[int, float], values: Sequence[float]) -> float:
        return float(sum(v * values[i] for i, v in coefficients.items()))

    def to_lp_text(self) -> str:
        """Fixed-order plain-text export (CPLEX-LP flavour) for cross-checking."""
        def term_list(indices, values):
            parts = []
            for i, v in zip(indices, values):
                sign = "-" if v < 0 else "+"
                parts.append(f"{sign} {abs(v):.17g} {self.names[i]}")
            if not parts:
                return "0"
            text = " ".join(parts)
            return text[2:] if text.startswith("+ ") else text

        lines = [f"\\ {self.name}", "Minimize"]
        obj = sorted(self.objective.items())
        lines.append(" obj: " + term_list([i for i, _ in obj], [v for _, v in obj]))
        lines.append("Subject To")
        for c in self.constraints:
            order = np.argsort(c.indices, kind="stable")
            lhs = term_list(c.indices[order], c.values[order])
            lines.append(f" {c.name}: {lhs} {c.sense} {c.rhs:.17g}")
        lines.append("Bounds")
        for name, lo, up in zip(self.names, self.lower, self.upper):
            hi = "+inf" if math.isinf(up) else f"{up:.17g}"
            lo_txt = "-inf" if math.isinf(lo) else f"{lo:.17g}"
            lines.append(f" {lo_txt} <= {name} <= {hi}")
        if self.binaries:
            lines.append("Binaries")
            lines.append(" " + " ".join(self.names[i] for i in sorted(self.binaries)))
        lines.append("End")
        return "\n".join(lines) + "\n"


def _as_sparse(coefficients: Coefficients, n: int) -> tuple[np.ndarray, np.ndarray]:
    items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
    merged: dict[int, float] = {}
    for i, v in items:
        i = int(i)
        if not 0 <= i < n:
            raise DomainError(f"coefficient references unknown variable {i}")
        v = float(v)
        if not math.isfinite(v):
            raise DomainError("coefficients must be finite")
        merged[i] = merged.get(i, 0.0) + v
    idx = np.fromiter(merged.keys(), dtype=np.int64, count=len(merged))
    vals = np.fromiter(merged.values(), dtype=float, count=len(merged))
    keep = vals != 0.0
    return idx[keep], vals[keep]


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    values: np.ndarray
    objective_value: float
    iterations: int
    is_mip: bool = False
    basis: Optional[tuple] = field(default=None, repr=False)
    duals: Optional[np.ndarray] = field(default=None, repr=False)
    reduced_costs: Optional[np.ndarray] = field(default=None, repr=False)
    nodes: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

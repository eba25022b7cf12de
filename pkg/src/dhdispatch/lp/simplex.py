"""Bounded-variable revised primal simplex.

Every row ``a_i x (sense) b_i`` gets a logical variable ``s_i`` so the
working system is ``[A | I] z = b`` with bounds on every column:

    <=  ->  s_i in [0, +inf)
    >=  ->  s_i in (-inf, 0]
    =   ->  s_i in [0, 0]

The slack basis is always available as a starting point, so no artificial
columns are needed. Phase 1 minimises the sum of bound violations of the
basic variables (the cost vector is rebuilt every iteration), phase 2 the
real objective. The basis inverse is kept as a sparse LU factorisation
(SuperLU) followed by a product-form eta file that is folded back into a
fresh factorisation every ``refactor_every`` pivots.

Pricing is Dantzig's rule with lowest-index tie-breaking. After
``stall_limit`` consecutive degenerate pivots the solver switches to
Bland's rule until the objective moves again. The ratio test is Harris'
two-pass test, except under Bland where the textbook minimum ratio with
lowest-index ties is used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..errors import SolverError, UnsupportedError
from .program import LinearProgram, LpSolution

BASIC, AT_LB, AT_UB, FREE, FIXED = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class SimplexOptions:
    primal_tol: float = 1e-9
    dual_tol: float = 1e-9
    pivot_tol: float = 1e-9
    refactor_every: int = 100
    stall_limit: int = 150
    max_iterations: Optional[int] = None
    retries: int = 3


class _Factor:
    """LU of a basis matrix plus a product-form eta file."""

    def __init__(self, basis_matrix: sp.csc_matrix):
        self.lu = splu(basis_matrix, permc_spec="COLAMD", diag_pivot_thresh=0.1,
                       options={"SymmetricMode": False})
        self.etas: list[tuple[int, float, np.ndarray, np.ndarray]] = []

    def ftran(self, a: np.ndarray) -> np.ndarray:
        x = self.lu.solve(a)
        for r, piv, idx, val in self.etas:
            xr = x[r] / piv
            if xr != 0.0:
                x[idx] -= val * xr
            x[r] = xr
        return x

    def btran(self, c: np.ndarray) -> np.ndarray:
        w = c.copy()
        for r, piv, idx, val in reversed(self.etas):
            w[r] = (w[r] - val @ w[idx]) / piv
        return self.lu.solve(w, trans="T")

    def push(self, r: int, alpha: np.ndarray, drop: float = 1e-13) -> None:
        nz = np.flatnonzero(np.abs(alpha) > drop)
        nz = nz[nz != r]
        self.etas.append((r, float(alpha[r]), nz, alpha[nz].copy()))


class _Simplex:
    def __init__(self, lp: LinearProgram, options: SimplexOptions, lower=None, upper=None):
        self.opt = options
        A = lp.matrix()
        m, n = A.shape
        self.n_struct = n
        self.m_orig = m

        row_nnz = np.diff(A.indptr)
        self.kept_rows = np.flatnonzero(row_nnz > 0)
        self.empty_infeasible = False
        rhs_all = np.array([c.rhs for c in lp.constraints], dtype=float)
        senses_all = [c.sense for c in lp.constraints]
        for i in np.flatnonzero(row_nnz == 0):
            b, s = rhs_all[i], senses_all[i]
            tol = options.primal_tol * max(1.0, abs(b))
            if (s == "<=" and b < -tol) or (s == ">=" and b > tol) or (s == "=" and abs(b) > tol):
                self.empty_infeasible = True
        A = A[self.kept_rows]
        m = A.shape[0]
        self.m = m
        self.b = rhs_all[self.kept_rows]
        senses = [senses_all[i] for i in self.kept_rows]

        self.Af = sp.hstack([A, sp.identity(m, format="csr")], format="csc")
        self.AfT = self.Af.T.tocsr()
        N = n + m
        lo = np.empty(N)
        up = np.empty(N)
        lo[:n] = lp.lower if lower is None else lower
        up[:n] = lp.upper if upper is None else upper
        for i, s in enumerate(senses):
            if s == "<=":
                lo[n + i], up[n + i] = 0.0, math.inf
            elif s == ">=":
                lo[n + i], up[n + i] = -math.inf, 0.0
            else:
                lo[n + i], up[n + i] = 0.0, 0.0
        self.lo, self.up = lo, up
        self.c = np.zeros(N)
        self.c[:n] = lp.cost_vector()
        self.cscale = max(1.0, float(np.max(np.abs(self.c))) if N else 1.0)
        self.iterations = 0

    # -- basis handling ---------------------------------------------------

    def _nonbasic_status(self, j: int, prefer_upper: bool = False) -> int:
        lo, up = self.lo[j], self.up[j]
        if lo == up:
            return FIXED
        lo_fin, up_fin = math.isfinite(lo), math.isfinite(up)
        if prefer_upper and up_fin:
            return AT_UB
        if lo_fin:
            return AT_LB
        if up_fin:
            return AT_UB
        return FREE

    def _place_nonbasic(self) -> None:
        st = self.status
        x = self.x
        nb = st != BASIC
        x[nb & ((st == AT_LB) | (st == FIXED))] = self.lo[nb & ((st == AT_LB) | (st == FIXED))]
        x[nb & (st == AT_UB)] = self.up[nb & (st == AT_UB)]
        x[nb & (st == FREE)] = 0.0

    def init_basis(self, warm: Optional[tuple]) -> None:
        n, m = self.n_struct, self.m
        N = n + m
        self.status = np.empty(N, dtype=np.int8)
        self.x = np.zeros(N)
        head = None
        at_upper = set()
        if warm is not None:
            head = self._translate_warm(warm)
            if head is not None:
                at_upper = set(warm[1])
        if head is None:
            head = np.arange(n, n + m)
        self.head = np.asarray(head, dtype=np.int64)
        for j in range(N):
            self.status[j] = self._nonbasic_status(j, prefer_upper=j in at_upper)
        self.status[self.head] = BASIC
        self._place_nonbasic()
        if not self._refactor(recover=True):
            self.head = np.arange(n, n + m)
            self.status[:] = [self._nonbasic_status(j) for j in range(N)]
            self.status[self.head] = BASIC
            self._place_nonbasic()
            self._refactor(recover=False)
        self._recompute_basics()

    def _translate_warm(self, warm: tuple) -> Optional[np.ndarray]:
        """Map a stored basis (structural+slack indices over the original
        rows) onto the current problem. Rows appended since then get their
        slack as basic variable."""
        head_orig, _, n_prev, m_prev = warm
        n, m = self.n_struct, self.m
        if n_prev != n or m_prev > self.m_orig:
            return None
        # original row index -> kept row position
        row_pos = -np.ones(self.m_orig, dtype=np.int64)
        row_pos[self.kept_rows] = np.arange(m)
        head = []
        used_rows = set()
        for j in head_orig:
            if j < n:
                head.append(j)
            else:
                p = row_pos[j - n]
                if p >= 0:
                    head.append(n + p)
                    used_rows.add(p)
        for p in range(m):
            orig = self.kept_rows[p]
            if orig >= m_prev and p not in used_rows:
                head.append(n + p)
        if len(head) != m or len(set(head)) != m:
            return None
        return np.array(head, dtype=np.int64)

    def export_basis(self) -> tuple:
        n = self.n_struct
        head = [int(j) if j < n else int(n + self.kept_rows[j - n]) for j in self.head]
        at_upper = tuple(int(j) for j in np.flatnonzero(self.status[:n] == AT_UB))
        return (tuple(head), at_upper, n, self.m_orig)

    def _refactor(self, recover: bool) -> bool:
        B = self.Af[:, self.head]
        try:
            self.factor = _Factor(B.tocsc())
        except RuntimeError:
            if recover:
                return False
            raise SolverError("singular basis after refactorisation",
                              {"iterations": self.iterations})
        return True

    def _recompute_basics(self) -> None:
        xb = self.x.copy()
        xb[self.head] = 0.0
        r = self.b - self.Af @ xb
        self.x[self.head] = self.factor.ftran(r)

    # -- main loop --------------------------------------------------------

    def _infeasibility(self):
        xb = self.x[self.head]
        lb = self.lo[self.head]
        ub = self.up[self.head]
        ptol = self.opt.primal_tol
        below = xb < lb - ptol * np.maximum(1.0, np.abs(lb))
        above = xb > ub + ptol * np.maximum(1.0, np.abs(ub))
        return below, above

    def run(self) -> str:
        opt = self.opt
        n, m = self.n_struct, self.m
        N = n + m
        max_iter = opt.max_iterations or (50 * (N + m) + 10000)
        degenerate_run = 0
        bland = False
        retries = 0
        lo, up = self.lo, self.up

        while True:
            if self.iterations >= max_iter:
                raise SolverError("iteration limit reached", {"iterations": self.iterations})
            below, above = self._infeasibility()
            phase1 = bool(below.any() or above.any())
            if phase1:
                cb = np.where(below, -1.0, np.where(above, 1.0, 0.0))
                y = self.factor.btran(cb)
                d = -(self.AfT @ y)
                dtol = opt.dual_tol
            else:
                y = self.factor.btran(self.c[self.head])
                d = self.c - self.AfT @ y
                dtol = opt.dual_tol * self.cscale
            st = self.status
            eligible = (((st == AT_LB) & (d < -dtol)) | ((st == AT_UB) & (d > dtol))
                        | ((st == FREE) & (np.abs(d) > dtol)))
            if not eligible.any():
                # confirm on a fresh factorisation before terminating
                if self.factor.etas and retries < opt.retries:
                    retries += 1
                    self._refactor(recover=False)
                    self._recompute_basics()
                    continue
                self.y, self.d = y, d
                return "infeasible" if phase1 else "optimal"
            retries = 0

            if bland:
                q = int(np.argmax(eligible))
            else:
                q = int(np.argmax(np.where(eligible, np.abs(d), 0.0)))
            s = 1.0 if (st[q] == AT_LB or (st[q] == FREE and d[q] < 0)) else -1.0
            col = self.Af[:, q].toarray().ravel()
            alpha = self.factor.ftran(col)
            delta = -s * alpha

            theta, r, target = self._ratio_test(delta, alpha, bland)
            flip = up[q] - lo[q]
            if r < 0 and not math.isfinite(flip):
                if phase1:
                    raise SolverError("unbounded phase-1 ray", {"iterations": self.iterations})
                self.y, self.d = y, d
                self.ray = (q, s, delta)
                return "unbounded"
            self.iterations += 1

            if r < 0 or flip <= theta:
                theta = flip
                self.x[self.head] += delta * theta
                if st[q] == AT_LB:
                    st[q] = AT_UB
                    self.x[q] = up[q]
                else:
                    st[q] = AT_LB
                    self.x[q] = lo[q]
            else:
                self.x[self.head] += delta * theta
                self.x[q] += s * theta
                leaving = int(self.head[r])
                self.x[leaving] = target
                if lo[leaving] == up[leaving]:
                    st[leaving] = FIXED
                elif target == lo[leaving]:
                    st[leaving] = AT_LB
                else:
                    st[leaving] = AT_UB
                st[q] = BASIC
                self.head[r] = q
                self.factor.push(r, alpha)
                if len(self.factor.etas) >= opt.refactor_every:
                    self._refactor(recover=False)
                    self._recompute_basics()

            if theta <= 1e-12:
                degenerate_run += 1
                if degenerate_run > opt.stall_limit:
                    bland = True
            else:
                degenerate_run = 0
                bland = False

    def _ratio_test(self, delta: np.ndarray, alpha: np.ndarray, bland: bool):
        """Return (step, leaving row or -1, bound the leaving variable lands on)."""
        opt = self.opt
        head = self.head
        xb = self.x[head]
        lb = self.lo[head]
        ub = self.up[head]
        ptol = opt.primal_tol
        mov = np.abs(alpha) > opt.pivot_tol
        down = mov & (delta < 0)
        upw = mov & (delta > 0)
        tol_lb = ptol * np.maximum(1.0, np.abs(np.where(np.isfinite(lb), lb, 0.0)))
        tol_ub = ptol * np.maximum(1.0, np.abs(np.where(np.isfinite(ub), ub, 0.0)))
        above = xb > ub + tol_ub
        below = xb < lb - tol_lb

        target = np.full(len(xb), np.nan)
        # decreasing variables: infeasible-above stop at ub, feasible stop at lb
        sel = down & above
        target[sel] = ub[sel]
        sel = down & ~above & ~below & np.isfinite(lb)
        target[sel] = lb[sel]
        sel = upw & below
        target[sel] = lb[sel]
        sel = upw & ~above & ~below & np.isfinite(ub)
        target[sel] = ub[sel]
        cand = np.flatnonzero(~np.isnan(target))
        if cand.size == 0:
            return math.inf, -1, math.nan
        dc = delta[cand]
        gap = target[cand] - xb[cand]
        exact = np.maximum(gap / dc, 0.0)
        if bland:
            tmin = exact.min()
            ties = cand[exact <= tmin + 1e-12 * max(1.0, tmin)]
            r = int(ties[np.argmin(head[ties])])
            return float(max(tmin, 0.0)), r, float(target[r])
        slack_tol = np.where(dc < 0, tol_lb[cand], tol_ub[cand])
        relaxed = (gap + np.sign(dc) * slack_tol) / dc
        theta_max = float(np.maximum(relaxed, 0.0).min())
        ok = exact <= theta_max
        pool = cand[ok]
        k = int(np.argmax(np.abs(alpha[pool])))
        r = int(pool[k])
        return float(exact[ok][k]), r, float(target[r])


def solve_lp(lp: LinearProgram, *, warm_start: Optional[tuple] = None,
             options: Optional[SimplexOptions] = None,
             lower=None, upper=None) -> LpSolution:
    """Solve the continuous relaxation of ``lp`` (binaries are ignored).

    ``warm_start`` takes the ``basis`` of an earlier solution of a program
    with the same variables and a prefix of the same rows. ``lower`` and
    ``upper`` override the variable bounds without copying the program.
    """
    options = options or SimplexOptions()
    n = lp.num_variables
    solver = _Simplex(lp, options, lower=lower, upper=upper)
    if solver.empty_infeasible or np.any(solver.lo[:n] > solver.up[:n]):
        return LpSolution("infeasible", np.full(n, np.nan), math.nan, 0)
    solver.init_basis(warm_start)
    status = solver.run()
    values = solver.x[:n].copy()
    if status != "optimal":
        return LpSolution(status, values, math.nan, solver.iterations)
    # bounds snap: nonbasic variables sit exactly on bounds, basic ones
    # may carry round-off of order primal_tol
    lo_n, up_n = solver.lo[:n], solver.up[:n]
    values = np.minimum(np.maximum(values, lo_n), up_n)
    duals = np.zeros(lp.num_constraints)
    duals[solver.kept_rows] = solver.y
    obj = float(solver.c[:n] @ values)
    return LpSolution("optimal", values, obj, solver.iterations,
                      basis=solver.export_basis(), duals=duals,
                      reduced_costs=solver.d[:n].copy())


def dual_values(lp: LinearProgram, solution: LpSolution) -> np.ndarray:
    """Row duals of an optimal LP solution.

    Sign convention for minimisation: ``>=`` rows have non-negative duals,
    ``<=`` rows non-positive ones, so that at optimality
    ``c x = b y + sum_j d_j x_j`` over the columns resting on bounds.
    """
    if solution.is_mip:
        raise UnsupportedError("dual values are not defined for a MILP solution")
    if solution.status != "optimal" or solution.duals is None:
        raise UnsupportedError("dual values need an optimal LP solution")
    if len(solution.duals) != lp.num_constraints:
        raise UnsupportedError("solution does not belong to this program")
    return solution.duals.copy()

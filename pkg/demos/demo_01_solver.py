"""
The embedded solver on toy problems
===================================

The package carries its own LP/MILP solver, so nothing here needs an
external optimiser. We build two small programs by hand and look at the
answers, the duals and the plain-text export.
"""
import numpy as np

from dhdispatch.lp import LinearProgram, dual_values, solve_lp, solve_milp

# A two-variable LP: make x + y as large as possible under three caps.
lp = LinearProgram("toy")
x = lp.add_variable("x")
y = lp.add_variable("y")
lp.add_constraint({x: 1, y: 1}, "<=", 3, "total")
lp.add_constraint({x: 1}, "<=", 2, "xcap")
lp.add_constraint({y: 1}, "<=", 2, "ycap")
lp.set_objective({x: -1, y: -1})

sol = solve_lp(lp)
print(sol.status, sol.values, sol.objective_value)

# Only the shared cap binds, so it alone carries a (negative) price.
print("duals:", dual_values(lp, sol))

# The debug export is byte-stable and readable by other LP tools.
print(lp.to_lp_text())

# A unit with a minimum load needs an on/off binary: 8u <= x <= 16u.
uc = LinearProgram("commitment")
x = uc.add_variable("x")
u = uc.add_variable("u", 0, 1, binary=True)
uc.add_constraint({x: 1, u: -8}, ">=", 0)
uc.add_constraint({x: 1, u: -16}, "<=", 0)
uc.add_constraint({x: 1}, "=", 12)
uc.set_objective({x: 10, u: 100})

best = solve_milp(uc)
print("x = %.1f, u = %.0f, cost %.0f after %d nodes" % (best.values[0], best.values[1],
                                                        best.objective_value, best.nodes))
assert np.isclose(best.objective_value, 220.0)

"""
Trading cost against emissions
==============================

The epsilon-constraint method: find the cheapest and the cleanest dispatch,
then minimise cost under a ladder of emission limits between the two.
"""
from dhdispatch.config import load_config, reference_config_path
from dhdispatch.pareto import front_is_consistent, pareto_front
from dhdispatch.scenario import build_problem

cfg = load_config(reference_config_path("scenario1")).with_run(horizon_hours=24 * 28, step_hours=3)
problem = build_problem(cfg)
front = pareto_front(problem, 7)

print(front.to_csv())
print("breaches of the front invariants:", front_is_consistent(front))

# The slope between neighbours is the price of abatement along the front.
pts = front.points
for a, b in zip(pts, pts[1:]):
    print("%8.1f -> %8.1f t: %6.1f CHF per t avoided"
          % (b.emissions, a.emissions, (a.cost - b.cost) / (b.emissions - a.emissions)))

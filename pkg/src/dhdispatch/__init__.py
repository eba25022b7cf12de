"""Operational dispatch optimisation for a district heating plant park.

The package embeds its own LP/MILP solver (``dhdispatch.lp``), builds the
per-step dispatch model of a waste-to-energy CHP, a gas turbine, a wood
boiler, a shared steam turbine and an optional seasonal heat store, and
traces cost/emissions Pareto fronts with the epsilon-constraint method.
"""
from .config import ScenarioConfig, calibrate_city_demand, load_config, parse_config, validate_scenario
from .core import FuelSpec, StorageSpec, SteamTurbineSpec, TechnologySpec
from .demand import DemandConfig, DemandProfile, TemperatureSeries
from .errors import (ConfigError, ConsistencyError, DataError, DispatchError, DomainError, InfeasibleError,
                     ResourceError, SolverError, UnsupportedError)
from .formulation import DispatchProblem, DispatchSolution, GridSpec, build_dispatch, validate_solution
from .pareto import ParetoFront, ParetoPoint, pareto_front, solve_single

__version__ = "0.1.0"

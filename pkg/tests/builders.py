"""Small problem factories shared by the test modules."""
from __future__ import annotations

from typing import Optional

import numpy as np

from dhdispatch.core import FuelSpec, StorageSpec, SteamTurbineSpec, TechnologySpec
from dhdispatch.demand import DemandProfile
from dhdispatch.formulation import DispatchProblem, GridSpec

WASTE = FuelSpec("waste", 3.3, cost_per_kg=-0.30, annual_mass_cap=110_000)
GAS = FuelSpec("natural_gas", cost_per_kwh=0.10)
WOOD = FuelSpec("wood", 4.0, cost_per_kg=0.24, annual_mass_cap=12_000, cap_active=False)


def wte(mode: str = "always_on", fuel: FuelSpec = WASTE, **kw) -> TechnologySpec:
    args = dict(electric_capacity=16.0, emission_intensity=0.775, min_load_fraction=0.5, min_load_mode=mode)
    args.update(kw)
    return TechnologySpec("wte_chp", fuel, 0.20, 0.45, **args)


def gas_turbine(fuel: FuelSpec = GAS, **kw) -> TechnologySpec:
    args = dict(electric_capacity=46.0, emission_intensity=0.760, thermal_output_carrier="steam")
    args.update(kw)
    return TechnologySpec("gas_turbine", fuel, 0.35, 0.53, **args)


def wood_boiler(capacity: float = 32.0, fuel: FuelSpec = WOOD, **kw) -> TechnologySpec:
    args = dict(thermal_capacity=capacity, emission_intensity=0.027, emission_basis="thermal_output",
                thermal_output_carrier="steam")
    args.update(kw)
    return TechnologySpec("wood_boiler", fuel, 0.0, 0.86, **args)


STEAM_TURBINE = SteamTurbineSpec(27.0, 0.07, 0.70)


def problem(heat, electricity=None, step: float = 1.0, storage: Optional[StorageSpec] = None,
            grid: Optional[GridSpec] = None, wte_spec: Optional[TechnologySpec] = None,
            gt_spec: Optional[TechnologySpec] = None, wb_spec: Optional[TechnologySpec] = None,
            **kw) -> DispatchProblem:
    heat = np.asarray(heat, dtype=float)
    el = np.zeros_like(heat) if electricity is None else np.asarray(electricity, dtype=float)
    return DispatchProblem(
        horizon=len(heat), step=step,
        wte=wte_spec or wte(), gas_turbine=gt_spec or gas_turbine(), wood_boiler=wb_spec or wood_boiler(),
        steam_turbine=STEAM_TURBINE,
        heat_demand=DemandProfile("heat", step, heat),
        electricity_demand=DemandProfile("electricity", step, el),
        grid=grid or GridSpec(), storage=storage, **kw)


def two_tech_toy(heat, step: float = 1.0) -> DispatchProblem:
    """Gas (cheap, dirty) against wood (dear, clean); the waste CHP is priced out.

    Electricity has no value and cannot be imported, so the only decision is
    how each step's heat is split between the two steam raisers.
    """
    pricey = FuelSpec("waste", cost_per_kwh=5.0)
    wood = FuelSpec("wood", cost_per_kwh=0.20)
    return problem(heat, step=step, wte_spec=wte("none", pricey, emission_intensity=5.0),
                   wb_spec=wood_boiler(fuel=wood),
                   grid=GridSpec(export_price=0.0, import_capacity=0.0))

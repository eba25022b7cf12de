"""Turn a scenario config into demand profiles and a dispatch problem.

Demand is always synthesised over the full weather year so the annual
totals keep their meaning; shorter horizons are a slice of that year and
coarser steps a block average of it.
"""
from __future__ import annotations

import calendar
from dataclasses import dataclass
from typing import Optional

from .config import ScenarioConfig
from .demand import (DemandProfile, TemperatureSeries, apply_dhn_share, apply_network_losses,
                     block_average, degree_weights, load_weather, synth_electricity, synth_heat,
                     synthetic_weather)
from .errors import ConfigError, DataError
from .formulation import DispatchProblem


@dataclass(frozen=True)
class ScenarioDemand:
    """Profiles over the run horizon at the run step (MW)."""

    weather: TemperatureSeries  # full year at the weather step
    city_heat: DemandProfile
    dhn_heat: DemandProfile
    electricity: DemandProfile
    year_hours: float


def year_hours(start) -> int:
    return 8784 if calendar.isleap(start.year) else 8760


def scenario_weather(config: ScenarioConfig) -> TemperatureSeries:
    w = config.weather
    if w.file is not None:
        try:
            text = w.file.read_bytes()
        except OSError as exc:
            raise DataError(f"cannot read weather file {w.file}: {exc}") from None
        return load_weather(text)
    start = config.run.start
    return synthetic_weather(start=start, hours=year_hours(start), mean=w.mean, amplitude=w.amplitude,
                             daily_ripple=w.daily_ripple, coldest_day=w.coldest_day,
                             noise_std=w.noise_std, noise_autocorr=w.noise_autocorr, seed=config.run.seed)


def _cut(profile: DemandProfile, n: int, factor: int) -> DemandProfile:
    sliced = DemandProfile(profile.carrier, profile.step, profile.values[:n])
    return block_average(sliced, factor)


def scenario_demand(config: ScenarioConfig, weather: Optional[TemperatureSeries] = None) -> ScenarioDemand:
    weather = weather if weather is not None else scenario_weather(config)
    run = config.run
    wstep = weather.step
    ratio = run.step_hours / wstep
    if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
        raise ConfigError(f"run step {run.step_hours} h is not a multiple of the weather step {wstep} h")
    n = run.horizon_hours / wstep
    if abs(n - round(n)) > 1e-9:
        raise ConfigError(f"horizon {run.horizon_hours} h is not a multiple of the weather step {wstep} h")
    n = int(round(n))
    if n > len(weather):
        raise DataError(f"weather covers {weather.hours:g} h, horizon needs {run.horizon_hours} h")

    d = config.demand
    city = synth_heat(d, degree_weights(weather, d.base_temperature), wstep)
    dhn = apply_network_losses(apply_dhn_share(city, d.dhn_share), d.network_loss_factor)
    el = synth_electricity(d, len(weather), wstep)
    factor = int(round(ratio))
    return ScenarioDemand(weather, _cut(city, n, factor), _cut(dhn, n, factor), _cut(el, n, factor),
                          weather.hours)


def build_problem(config: ScenarioConfig, demand: Optional[ScenarioDemand] = None) -> DispatchProblem:
    demand = demand if demand is not None else scenario_demand(config)
    t = config.technologies
    return DispatchProblem(
        horizon=len(demand.dhn_heat),
        step=float(config.run.step_hours),
        wte=t["wte"], gas_turbine=t["gt"], wood_boiler=t["wb"],
        steam_turbine=config.steam_turbine,
        heat_demand=demand.dhn_heat,
        electricity_demand=demand.electricity,
        grid=config.grid,
        storage=config.storage,
        requires_storage=config.kind in ("2", "3"),
        allow_steam_dump=config.allow_steam_dump,
        hours_per_year=demand.year_hours,
    )

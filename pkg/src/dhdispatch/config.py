"""Scenario configuration files.

Configs are INI files read with :mod:`configparser`; nesting is expressed
with dotted section names (``[fuel.waste]``, ``[technology.wte_chp]``).
Every key has a default except the three listed in ``REQUIRED``; unknown
sections or keys are rejected so typos surface immediately. Money and
intensities are given in Rappen and grams at this boundary and converted
to CHF and tonnes on the way in. See ``docs/config.md`` for the schema.
"""
from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass, field, replace
from datetime import datetime
from pathlib import Path
from typing import IO, NamedTuple, Optional, Union

from .core import (FuelSpec, StorageSpec, SteamTurbineSpec, TechnologySpec, chf_per_mwh_to_rp_per_kwh,
                   g_per_kwh_to_t_per_mwh, rp_to_chf, t_per_mwh_to_g_per_kwh)
from .demand import DemandConfig
from .errors import ConfigError, DomainError
from .formulation import GridSpec

TECH_SECTIONS = {"wte_chp": "wte", "gas_turbine": "gt", "wood_boiler": "wb"}
BACKGROUND_TYPES = ("oil", "gas", "wood", "electric", "heat_pump")
OBJECTIVES = ("cost", "emissions", "pareto")
REQUIRED = ("scenario.id", "demand.dhn_share", "demand.city_heat_mwh | demand.calibration_target_mwh")


class CityDemand(NamedTuple):
    total: float
    space_heating: float
    dhw: float


def calibrate_city_demand(target_dhn_annual: float, share: float,
                          space_heating_fraction: float = 0.85) -> CityDemand:
    """City-wide annual heat demand (MWh) implied by a DHN delivery at a given share."""
    if not (0 < share <= 1):
        raise DomainError(f"share {share} outside (0, 1]")
    if not target_dhn_annual > 0:
        raise DomainError("target DHN demand must be > 0")
    if not 0 <= space_heating_fraction <= 1:
        raise DomainError("space_heating_fraction outside [0, 1]")
    total = target_dhn_annual / share
    return CityDemand(total, total * space_heating_fraction, total * (1.0 - space_heating_fraction))


@dataclass(frozen=True)
class BackgroundHeater:
    """Decentralised heater type. ``intensity`` is t CO2-eq per MWh of heat
    delivered; ``efficiency`` (a COP for heat pumps) converts that heat back
    to final energy (fuel or electricity) for the energy columns."""

    name: str
    fraction: float
    efficiency: float
    intensity: float


DEFAULT_BACKGROUND = (
    BackgroundHeater("oil", 0.35, 0.90, 0.334),
    BackgroundHeater("gas", 0.35, 0.95, 0.240),
    BackgroundHeater("wood", 0.05, 0.85, 0.032),
    BackgroundHeater("electric", 0.07, 1.00, 0.128),
    BackgroundHeater("heat_pump", 0.18, 3.00, 0.043),
)


@dataclass(frozen=True)
class WeatherConfig:
    file: Optional[Path] = None
    mean: float = 9.5
    amplitude: float = 9.0
    daily_ripple: float = 3.0
    coldest_day: float = 15.0
    noise_std: float = 0.0
    noise_autocorr: float = 0.8


@dataclass(frozen=True)
class RunOptions:
    start: datetime = datetime(2023, 1, 1)
    horizon_hours: int = 8760
    step_hours: int = 1
    objective: str = "emissions"
    n_pareto_points: int = 11
    output_dir: str = "output"
    seed: int = 0


@dataclass(frozen=True)
class ScenarioConfig:
    id: str
    name: str
    kind: str  # "1", "2", "3" or "custom"
    demand: DemandConfig
    city_heat_mwh: float
    space_heating_fraction: float
    fuels: dict
    technologies: dict  # role -> TechnologySpec (multipliers applied)
    steam_turbine: SteamTurbineSpec
    storage: Optional[StorageSpec]
    grid: GridSpec
    background: tuple = DEFAULT_BACKGROUND
    weather: WeatherConfig = field(default_factory=WeatherConfig)
    run: RunOptions = field(default_factory=RunOptions)
    multipliers: dict = field(default_factory=dict)
    calibration: Optional[tuple] = None  # (target MWh, share) when backed out
    allow_steam_dump: bool = True

    def with_run(self, **changes) -> "ScenarioConfig":
        return replace(self, run=replace(self.run, **changes))


def validate_scenario(config: ScenarioConfig) -> list[str]:
    """All invariant breaches of a configuration, as human-readable strings."""
    out: list[str] = []
    for fuel in config.fuels.values():
        out += fuel.violations()
    for role, tech in config.technologies.items():
        out += tech.violations()
        if tech.fuel.name not in config.fuels:
            out.append(f"technology {tech.name!r}: fuel {tech.fuel.name!r} is not defined")
    missing = set(TECH_SECTIONS.values()) - set(config.technologies)
    if missing:
        out.append(f"missing technologies: {sorted(missing)}")
    out += config.steam_turbine.violations()
    if config.storage is not None:
        out += config.storage.violations()
    out += config.grid.violations()
    out += config.demand.violations()
    if not (math.isfinite(config.city_heat_mwh) and config.city_heat_mwh >= 0):
        out.append("demand: city heat demand must be finite and >= 0")
    run = config.run
    if run.step_hours <= 0 or run.horizon_hours <= 0:
        out.append("run: horizon and step must be positive")
    elif run.horizon_hours % run.step_hours:
        out.append(f"run: horizon {run.horizon_hours} h is not a multiple of step {run.step_hours} h")
    if run.objective not in OBJECTIVES:
        out.append(f"run: unknown objective {run.objective!r}")
    if run.n_pareto_points < 2:
        out.append("run: n_pareto_points must be >= 2")
    total = sum(b.fraction for b in config.background)
    if abs(total - 1.0) > 1e-9:
        out.append(f"background: fractions sum to {total}, expected 1")
    for b in config.background:
        if not (b.fraction >= 0 and b.efficiency > 0 and math.isfinite(b.intensity) and b.intensity >= 0):
            out.append(f"background: invalid parameters for {b.name!r}")
    if config.kind in ("2", "3") and config.storage is None:
        out.append(f"scenario {config.kind} requires a storage unit")
    if config.kind == "3" and abs(config.demand.dhn_share - 0.5) > 1e-12:
        out.append("scenario 3 requires dhn_share = 0.5")
    if config.kind not in ("1", "2", "3", "custom"):
        out.append(f"scenario: unknown kind {config.kind!r}")
    return out


# -- parsing -----------------------------------------------------------------

_SCHEMA: dict[str, dict[str, type]] = {
    "scenario": {"id": str, "name": str, "kind": str},
    "demand": {"dhn_share": float, "city_heat_mwh": float, "calibration_target_mwh": float,
               "calibration_share": float, "space_heating_fraction": float,
               "annual_electricity_mwh": float, "base_temperature_c": float,
               "network_loss_factor": float, "daily_amplitude": float,
               "seasonal_amplitude": float, "peak_hour": float, "peak_day": float},
    "weather": {"file": str, "mean_c": float, "amplitude_c": float, "daily_ripple_c": float,
                "coldest_day": float, "noise_std_c": float, "noise_autocorr": float},
    "fuel": {"lhv_kwh_per_kg": float, "cost_rp_per_kg": float, "cost_rp_per_kwh": float,
             "annual_mass_cap_t": float, "cap_active": bool, "mass_cap_multiplier": float},
    "technology": {"fuel": str, "electric_capacity_mw": float, "thermal_capacity_mw": float,
                   "eta_el": float, "eta_th": float, "emission_g_per_kwh": float,
                   "emission_basis": str, "min_load_fraction": float, "min_load_mode": str,
                   "capacity_multiplier": float},
    "steam_turbine": {"electric_capacity_mw": float, "eta_el": float, "eta_th": float,
                      "allow_steam_dump": bool},
    "storage": {"enabled": bool, "energy_capacity_mwh": float, "charge_power_mw": float,
                "discharge_power_mw": float, "charge_efficiency": float,
                "discharge_efficiency": float, "standing_loss_per_h": float, "cyclic": bool,
                "initial_soc_mwh": float},
    "grid": {"import_price_chf_per_mwh": float, "export_price_chf_per_mwh": float,
             "import_intensity_g_per_kwh": float, "import_capacity_mw": float,
             "export_capacity_mw": float},
    "background": {"fraction": float, "efficiency": float, "intensity_g_per_kwh_heat": float},
    "run": {"start": str, "horizon_hours": int, "step_hours": int, "objective": str,
            "n_pareto_points": int, "output_dir": str, "seed": int},
}

# Table 1 values plus the documented defaults for paper gaps.
DEFAULT_FUELS = {
    "waste": {"lhv_kwh_per_kg": 3.3, "cost_rp_per_kg": -30.0, "annual_mass_cap_t": 110_000.0},
    "natural_gas": {"cost_rp_per_kwh": 10.0},
    "wood": {"lhv_kwh_per_kg": 4.0, "cost_rp_per_kg": 24.0, "annual_mass_cap_t": 12_000.0},
}
DEFAULT_TECHNOLOGIES = {
    "wte_chp": {"fuel": "waste", "electric_capacity_mw": 16.0, "eta_el": 0.20, "eta_th": 0.45,
                "emission_g_per_kwh": 775.0, "emission_basis": "electric_output",
                "min_load_fraction": 0.5, "min_load_mode": "always_on"},
    "gas_turbine": {"fuel": "natural_gas", "electric_capacity_mw": 46.0, "eta_el": 0.35, "eta_th": 0.53,
                    "emission_g_per_kwh": 760.0, "emission_basis": "electric_output",
                    "min_load_fraction": 0.0, "min_load_mode": "none"},
    "wood_boiler": {"fuel": "wood", "thermal_capacity_mw": 32.0, "eta_el": 0.0, "eta_th": 0.86,
                    "emission_g_per_kwh": 27.0, "emission_basis": "thermal_output",
                    "min_load_fraction": 0.0, "min_load_mode": "none"},
}
_CARRIER = {"wte_chp": "heat", "gas_turbine": "steam", "wood_boiler": "steam"}


def _split(section: str) -> tuple[str, Optional[str]]:
    head, _, tail = section.partition(".")
    return head, (tail or None)


def _convert(path: str, raw: str, kind: type):
    raw = raw.strip()
    try:
        if kind is bool:
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
    except ValueError:
        raise ConfigError(f"{path}: cannot read {raw!r} as {kind.__name__}") from None
    return raw


def _read_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    raw = source.read()
    return raw.decode("utf-8") if isinstance(raw, bytes) else raw


def _load(text: str) -> dict[str, dict[str, object]]:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"),
                                       default_section="__defaults__")
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    data: dict[str, dict[str, object]] = {}
    for section in parser.sections():
        head, sub = _split(section)
        schema = _SCHEMA.get(head)
        if schema is None:
            raise ConfigError(f"unknown section [{section}]")
        if head in ("fuel", "technology") and sub is None:
            raise ConfigError(f"[{section}] needs a name, e.g. [{head}.waste]")
        if head == "technology" and sub not in TECH_SECTIONS:
            raise ConfigError(f"unknown technology [{section}]; expected one of {sorted(TECH_SECTIONS)}")
        if head == "background" and sub is not None and sub not in BACKGROUND_TYPES:
            raise ConfigError(f"unknown background heater [{section}]")
        if head not in ("fuel", "technology", "background") and sub is not None:
            raise ConfigError(f"unknown section [{section}]")
        values = {}
        for key, raw in parser.items(section):
            if head == "background" and sub is None:
                raise ConfigError(f"{section}.{key}: put heater parameters in [background.<type>] sections")
            if key not in schema:
                raise ConfigError(f"unknown key {section}.{key}")
            values[key] = _convert(f"{section}.{key}", raw, schema[key])
        data[section] = values
    return data


def parse_config(source: Union[bytes, str, IO], base_dir: Optional[Path] = None) -> ScenarioConfig:
    """Read, default and validate a scenario config. Raises :class:`ConfigError`."""
    text = _read_text(source)
    data = _load(text)
    missing = []
    if "id" not in data.get("scenario", {}):
        missing.append("scenario.id")
    dem = data.get("demand", {})
    if "dhn_share" not in dem:
        missing.append("demand.dhn_share")
    if "city_heat_mwh" not in dem and "calibration_target_mwh" not in dem:
        missing.append("demand.city_heat_mwh | demand.calibration_target_mwh")
    if missing:
        raise ConfigError("missing required keys: " + ", ".join(missing))

    sc = data["scenario"]
    sh_frac = dem.get("space_heating_fraction", 0.85)
    calibration = None
    if "city_heat_mwh" in dem:
        if "calibration_target_mwh" in dem:
            raise ConfigError("demand: give either city_heat_mwh or calibration_target_mwh, not both")
        city = dem["city_heat_mwh"]
    else:
        share = dem.get("calibration_share", dem["dhn_share"])
        calibration = (dem["calibration_target_mwh"], share)
        try:
            city = calibrate_city_demand(dem["calibration_target_mwh"], share, sh_frac).total
        except DomainError as exc:
            raise ConfigError(f"demand calibration: {exc}") from None
    demand = DemandConfig(
        annual_space_heating=city * sh_frac,
        annual_dhw=city * (1.0 - sh_frac),
        annual_electricity=dem.get("annual_electricity_mwh", 1_000_000.0),
        dhn_share=dem["dhn_share"],
        base_temperature=dem.get("base_temperature_c", 15.0),
        daily_amplitude=dem.get("daily_amplitude", 0.25),
        seasonal_amplitude=dem.get("seasonal_amplitude", 0.10),
        peak_hour=dem.get("peak_hour", 18.0),
        peak_day=dem.get("peak_day", 15.0),
        network_loss_factor=dem.get("network_loss_factor", 0.0),
    )

    w = data.get("weather", {})
    wfile = w.get("file")
    if wfile:
        p = Path(wfile)
        if not p.is_absolute() and base_dir is not None:
            p = Path(base_dir) / p
        wfile = p
    weather = WeatherConfig(
        file=wfile or None,
        mean=w.get("mean_c", 9.5), amplitude=w.get("amplitude_c", 9.0),
        daily_ripple=w.get("daily_ripple_c", 3.0), coldest_day=w.get("coldest_day", 15.0),
        noise_std=w.get("noise_std_c", 0.0), noise_autocorr=w.get("noise_autocorr", 0.8))

    fuels = {}
    fuel_names = set(DEFAULT_FUELS) | {s.split(".", 1)[1] for s in data if s.startswith("fuel.")}
    for name in sorted(fuel_names):
        vals = dict(DEFAULT_FUELS.get(name, {}))
        user = data.get(f"fuel.{name}", {})
        if "cost_rp_per_kwh" in user:
            vals.pop("cost_rp_per_kg", None)
        if "cost_rp_per_kg" in user:
            vals.pop("cost_rp_per_kwh", None)
        vals.update(user)
        cap = vals.get("annual_mass_cap_t")
        if cap is not None:
            cap *= vals.get("mass_cap_multiplier", 1.0)
        fuels[name] = FuelSpec(
            name=name,
            lower_heating_value=vals.get("lhv_kwh_per_kg"),
            cost_per_kg=rp_to_chf(vals["cost_rp_per_kg"]) if "cost_rp_per_kg" in vals else None,
            cost_per_kwh=rp_to_chf(vals["cost_rp_per_kwh"]) if "cost_rp_per_kwh" in vals else None,
            annual_mass_cap=cap,
            cap_active=vals.get("cap_active", name != "wood"),
        )

    technologies = {}
    multipliers = {}
    for section, role in TECH_SECTIONS.items():
        vals = dict(DEFAULT_TECHNOLOGIES[section])
        vals.update(data.get(f"technology.{section}", {}))
        fname = vals["fuel"]
        if fname not in fuels:
            raise ConfigError(f"technology.{section}.fuel: fuel {fname!r} is not defined")
        mult = vals.get("capacity_multiplier", 1.0)
        multipliers[section] = mult
        el_cap = vals.get("electric_capacity_mw")
        th_cap = vals.get("thermal_capacity_mw")
        technologies[role] = TechnologySpec(
            name=section,
            fuel=fuels[fname],
            eta_el=vals["eta_el"],
            eta_th=vals["eta_th"],
            electric_capacity=None if el_cap is None else el_cap * mult,
            thermal_capacity=None if th_cap is None else th_cap * mult,
            emission_intensity=g_per_kwh_to_t_per_mwh(vals["emission_g_per_kwh"]),
            emission_basis=vals["emission_basis"],
            min_load_fraction=vals["min_load_fraction"],
            min_load_mode=vals["min_load_mode"],
            thermal_output_carrier=_CARRIER[section],
        )

    stv = {"electric_capacity_mw": 27.0, "eta_el": 0.07, "eta_th": 0.70, "allow_steam_dump": True}
    stv.update(data.get("steam_turbine", {}))
    steam_turbine = SteamTurbineSpec(stv["electric_capacity_mw"], stv["eta_el"], stv["eta_th"])

    sv = data.get("storage", {})
    storage = None
    if sv.get("enabled", False):
        storage = StorageSpec(
            energy_capacity=sv.get("energy_capacity_mwh", 15_000.0),
            charge_power_cap=sv.get("charge_power_mw", 50.0),
            discharge_power_cap=sv.get("discharge_power_mw", 50.0),
            charge_efficiency=sv.get("charge_efficiency", 0.93),
            discharge_efficiency=sv.get("discharge_efficiency", 0.93),
            standing_loss_rate=sv.get("standing_loss_per_h", 2e-5),
            cyclic=sv.get("cyclic", True),
            initial_soc=sv.get("initial_soc_mwh", 0.0),
        )

    gv = data.get("grid", {})
    grid = GridSpec(
        import_price=gv.get("import_price_chf_per_mwh", 200.0),
        export_price=gv.get("export_price_chf_per_mwh", 80.0),
        import_intensity=g_per_kwh_to_t_per_mwh(gv.get("import_intensity_g_per_kwh", 128.0)),
        import_capacity=gv.get("import_capacity_mw", math.inf),
        export_capacity=gv.get("export_capacity_mw", math.inf),
    )

    background = []
    for default in DEFAULT_BACKGROUND:
        bv = data.get(f"background.{default.name}", {})
        background.append(BackgroundHeater(
            default.name,
            bv.get("fraction", default.fraction),
            bv.get("efficiency", default.efficiency),
            (g_per_kwh_to_t_per_mwh(bv["intensity_g_per_kwh_heat"]) if "intensity_g_per_kwh_heat" in bv
             else default.intensity),
        ))

    rv = data.get("run", {})
    try:
        start = datetime.fromisoformat(rv.get("start", "2023-01-01T00:00"))
    except ValueError:
        raise ConfigError(f"run.start: bad timestamp {rv.get('start')!r}") from None
    run = RunOptions(
        start=start,
        horizon_hours=rv.get("horizon_hours", 8760),
        step_hours=rv.get("step_hours", 1),
        objective=rv.get("objective", "emissions"),
        n_pareto_points=rv.get("n_pareto_points", 11),
        output_dir=rv.get("output_dir", f"output/{sc['id']}"),
        seed=rv.get("seed", 0),
    )

    config = ScenarioConfig(
        id=sc["id"], name=sc.get("name", sc["id"]), kind=sc.get("kind", "custom"),
        demand=demand, city_heat_mwh=city, space_heating_fraction=sh_frac,
        fuels=fuels, technologies=technologies, steam_turbine=steam_turbine,
        storage=storage, grid=grid, background=tuple(background), weather=weather, run=run,
        multipliers=multipliers, calibration=calibration,
        allow_steam_dump=stv["allow_steam_dump"],
    )
    problems = validate_scenario(config)
    if problems:
        raise ConfigError("invalid scenario: " + "; ".join(problems))
    return config


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, base_dir=path.parent)


def reference_config_path(name: str) -> Path:
    """Path of a shipped reference config (``scenario1`` .. ``scenario3``)."""
    path = Path(__file__).parent / "data" / f"{name}.cfg"
    if not path.exists():
        raise ConfigError(f"no shipped config named {name!r}")
    return path


def format_config(config: ScenarioConfig) -> str:
    """Fully resolved config in the input format (round-trips through parse_config)."""
    def num(v):
        return "inf" if v == math.inf else repr(float(v))

    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    parser["scenario"] = {"id": config.id, "name": config.name, "kind": config.kind}
    d = config.demand
    parser["demand"] = {
        "dhn_share": num(d.dhn_share), "city_heat_mwh": num(config.city_heat_mwh),
        "space_heating_fraction": num(config.space_heating_fraction),
        "annual_electricity_mwh": num(d.annual_electricity), "base_temperature_c": num(d.base_temperature),
        "network_loss_factor": num(d.network_loss_factor), "daily_amplitude": num(d.daily_amplitude),
        "seasonal_amplitude": num(d.seasonal_amplitude), "peak_hour": num(d.peak_hour),
        "peak_day": num(d.peak_day)}
    w = config.weather
    wsec = {"mean_c": num(w.mean), "amplitude_c": num(w.amplitude), "daily_ripple_c": num(w.daily_ripple),
            "coldest_day": num(w.coldest_day), "noise_std_c": num(w.noise_std),
            "noise_autocorr": num(w.noise_autocorr)}
    if w.file is not None:
        wsec["file"] = str(w.file)
    parser["weather"] = wsec
    for name, f in sorted(config.fuels.items()):
        sec = {"cap_active": str(f.cap_active).lower()}
        if f.lower_heating_value is not None:
            sec["lhv_kwh_per_kg"] = num(f.lower_heating_value)
        if f.cost_per_kg is not None:
            sec["cost_rp_per_kg"] = num(f.cost_per_kg * 100.0)
        if f.cost_per_kwh is not None:
            sec["cost_rp_per_kwh"] = num(chf_per_mwh_to_rp_per_kwh(f.cost_per_kwh * 1000.0))
        if f.annual_mass_cap is not None:
            sec["annual_mass_cap_t"] = num(f.annual_mass_cap)
        parser[f"fuel.{name}"] = sec
    for section, role in TECH_SECTIONS.items():
        t = config.technologies[role]
        sec = {"fuel": t.fuel.name, "eta_el": num(t.eta_el), "eta_th": num(t.eta_th),
               "emission_g_per_kwh": num(t_per_mwh_to_g_per_kwh(t.emission_intensity)),
               "emission_basis": t.emission_basis, "min_load_fraction": num(t.min_load_fraction),
               "min_load_mode": t.min_load_mode}
        if t.electric_capacity is not None:
            sec["electric_capacity_mw"] = num(t.electric_capacity)
        if t.thermal_capacity is not None:
            sec["thermal_capacity_mw"] = num(t.thermal_capacity)
        parser[f"technology.{section}"] = sec
    st = config.steam_turbine
    parser["steam_turbine"] = {"electric_capacity_mw": num(st.electric_capacity), "eta_el": num(st.eta_el),
                               "eta_th": num(st.eta_th), "allow_steam_dump": str(config.allow_steam_dump).lower()}
    s = config.storage
    if s is None:
        parser["storage"] = {"enabled": "false"}
    else:
        parser["storage"] = {
            "enabled": "true", "energy_capacity_mwh": num(s.energy_capacity),
            "charge_power_mw": num(s.charge_power_cap), "discharge_power_mw": num(s.discharge_power_cap),
            "charge_efficiency": num(s.charge_efficiency), "discharge_efficiency": num(s.discharge_efficiency),
            "standing_loss_per_h": num(s.standing_loss_rate), "cyclic": str(s.cyclic).lower(),
            "initial_soc_mwh": num(s.initial_soc)}
    g = config.grid
    parser["grid"] = {
        "import_price_chf_per_mwh": num(g.import_price), "export_price_chf_per_mwh": num(g.export_price),
        "import_intensity_g_per_kwh": num(t_per_mwh_to_g_per_kwh(g.import_intensity)),
        "import_capacity_mw": num(g.import_capacity), "export_capacity_mw": num(g.export_capacity)}
    for b in config.background:
        parser[f"background.{b.name}"] = {"fraction": num(b.fraction), "efficiency": num(b.efficiency),
                                          "intensity_g_per_kwh_heat": num(t_per_mwh_to_g_per_kwh(b.intensity))}
    r = config.run
    parser["run"] = {"start": r.start.isoformat(), "horizon_hours": str(r.horizon_hours),
                     "step_hours": str(r.step_hours), "objective": r.objective,
                     "n_pareto_points": str(r.n_pareto_points), "output_dir": r.output_dir,
                     "seed": str(r.seed)}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()

"""Plant, fuel and storage descriptions plus the conversion arithmetic.

Internal units are MW for power, MWh for energy, CHF for money and
tonnes CO2-eq for emissions. Rappen and grams only show up when reading
configuration files; the helpers at the top of this module do those
conversions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError, DomainError

HOURS_PER_YEAR = 8760.0

EMISSION_BASES = ("electric_output", "thermal_output")
MIN_LOAD_MODES = ("always_on", "unit_commitment", "none")
THERMAL_CARRIERS = ("heat", "steam")
CARRIERS = ("waste", "gas", "wood", "steam", "heat", "electricity")


# -- unit conversions ------------------------------------------------------

def rp_per_kwh_to_chf_per_mwh(value: float) -> float:
    return value * 10.0


def chf_per_mwh_to_rp_per_kwh(value: float) -> float:
    return value / 10.0


def rp_to_chf(value: float) -> float:
    return value / 100.0


def g_per_kwh_to_t_per_mwh(value: float) -> float:
    return value * 1e-3


def t_per_mwh_to_g_per_kwh(value: float) -> float:
    return value * 1e3


# -- domain types ----------------------------------------------------------

@dataclass(frozen=True)
class FuelSpec:
    """A fuel priced either per kg or per kWh.

    ``cost_per_kg`` is CHF/kg, ``cost_per_kwh`` is CHF/kWh; exactly one of
    them must be set. ``annual_mass_cap`` is in tonnes per year, ``None``
    meaning unbounded. ``cap_active`` lets a configuration switch the cap
    off without deleting it.
    """

    name: str
    lower_heating_value: Optional[float] = None  # kWh/kg
    cost_per_kg: Optional[float] = None
    cost_per_kwh: Optional[float] = None
    annual_mass_cap: Optional[float] = None
    cap_active: bool = True

    @property
    def annual_energy_cap(self) -> Optional[float]:
        """Fuel energy available per year in MWh (t * kWh/kg == MWh)."""
        if self.annual_mass_cap is None or self.lower_heating_value is None:
            return None
        return self.annual_mass_cap * self.lower_heating_value

    @property
    def cost_per_mwh(self) -> float:
        """Fuel cost in CHF per MWh of fuel energy."""
        if self.cost_per_kwh is not None:
            return self.cost_per_kwh * 1000.0
        if self.cost_per_kg is None:
            raise ConfigError(f"fuel {self.name!r} has no cost")
        if not self.lower_heating_value:
            raise ConfigError(f"fuel {self.name!r} is priced per kg but has no lower heating value")
        return self.cost_per_kg * 1000.0 / self.lower_heating_value

    def violations(self) -> list[str]:
        out = []
        if (self.cost_per_kg is None) == (self.cost_per_kwh is None):
            out.append(f"fuel {self.name!r}: exactly one of cost_per_kg / cost_per_kwh must be set")
        mass_based = self.cost_per_kg is not None or self.annual_mass_cap is not None
        if mass_based and not (self.lower_heating_value is not None and self.lower_heating_value > 0):
            out.append(f"fuel {self.name!r}: lower heating value must be > 0 for mass-based quantities")
        for label, value in (("lower_heating_value", self.lower_heating_value),
                             ("cost_per_kg", self.cost_per_kg),
                             ("cost_per_kwh", self.cost_per_kwh)):
            if value is not None and not math.isfinite(value):
                out.append(f"fuel {self.name!r}: {label} is not finite")
        if self.annual_mass_cap is not None and not self.annual_mass_cap >= 0:
            out.append(f"fuel {self.name!r}: annual_mass_cap must be >= 0")
        return out


@dataclass(frozen=True)
class TechnologySpec:
    """One conversion unit fed by a single fuel.

    ``emission_intensity`` is in t CO2-eq per MWh of the output named by
    ``emission_basis``. Units without an electric output carry their
    size in ``thermal_capacity`` (MW of thermal output).
    """

    name: str
    fuel: FuelSpec
    eta_el: float
    eta_th: float
    electric_capacity: Optional[float] = None
    thermal_capacity: Optional[float] = None
    emission_intensity: float = 0.0
    emission_basis: str = "electric_output"
    min_load_fraction: float = 0.0
    min_load_mode: str = "none"
    thermal_output_carrier: str = "heat"

    def violations(self) -> list[str]:
        n = self.name
        out = []
        for label, eta in (("eta_el", self.eta_el), ("eta_th", self.eta_th)):
            if not (0.0 <= eta <= 1.0):
                out.append(f"technology {n!r}: {label}={eta} outside [0, 1]")
        if self.eta_el + self.eta_th > 1.0 + 1e-12:
            out.append(f"technology {n!r}: eta_el + eta_th = {self.eta_el + self.eta_th:g} exceeds 1")
        if not (0.0 <= self.min_load_fraction <= 1.0):
            out.append(f"technology {n!r}: min_load_fraction outside [0, 1]")
        if self.eta_el > 0 and not (self.electric_capacity is not None and self.electric_capacity > 0):
            out.append(f"technology {n!r}: electric_capacity must be > 0 when eta_el > 0")
        if self.thermal_capacity is not None and not self.thermal_capacity >= 0:
            out.append(f"technology {n!r}: thermal_capacity must be >= 0")
        if not math.isfinite(self.emission_intensity) or self.emission_intensity < 0:
            out.append(f"technology {n!r}: emission intensity must be finite and >= 0")
        if self.emission_basis not in EMISSION_BASES:
            out.append(f"technology {n!r}: unknown emission basis {self.emission_basis!r}")
        if self.min_load_mode not in MIN_LOAD_MODES:
            out.append(f"technology {n!r}: unknown min_load_mode {self.min_load_mode!r}")
        if self.thermal_output_carrier not in THERMAL_CARRIERS:
            out.append(f"technology {n!r}: unknown thermal carrier {self.thermal_output_carrier!r}")
        if self.emission_basis == "electric_output" and self.eta_el == 0 and self.emission_intensity > 0:
            out.append(f"technology {n!r}: electric emission basis on a unit without electric output")
        return out

    @property
    def capacity_basis(self) -> Optional[str]:
        """Which output the unit size refers to, or None for an unbounded unit."""
        if self.electric_capacity is not None and self.eta_el > 0:
            return "electric"
        if self.thermal_capacity is not None:
            return "thermal"
        return None

    @property
    def max_fuel_power(self) -> float:
        """Fuel input (MW) that saturates the unit; ``inf`` when unsized."""
        basis = self.capacity_basis
        if basis == "electric":
            return self.electric_capacity / self.eta_el
        if basis == "thermal":
            return self.thermal_capacity / self.eta_th if self.eta_th > 0 else 0.0
        return math.inf

    @property
    def capacity(self) -> Optional[float]:
        basis = self.capacity_basis
        if basis == "electric":
            return self.electric_capacity
        if basis == "thermal":
            return self.thermal_capacity
        return None

    @property
    def capacity_eta(self) -> float:
        return self.eta_el if self.capacity_basis == "electric" else self.eta_th

    @property
    def emissions_per_fuel_mwh(self) -> float:
        eta = self.eta_el if self.emission_basis == "electric_output" else self.eta_th
        return self.emission_intensity * eta


@dataclass(frozen=True)
class SteamTurbineSpec:
    """Back-pressure steam turbine: steam in, electricity and district heat out."""

    electric_capacity: float
    eta_el: float
    eta_th: float
    name: str = "steam_turbine"

    def violations(self) -> list[str]:
        out = []
        if self.eta_el + self.eta_th > 1.0 + 1e-12:
            out.append(f"technology {self.name!r}: eta_el + eta_th = {self.eta_el + self.eta_th:g} exceeds 1")
        if not (0 <= self.eta_el <= 1 and 0 <= self.eta_th <= 1):
            out.append(f"technology {self.name!r}: efficiencies outside [0, 1]")
        if not self.electric_capacity > 0:
            out.append(f"technology {self.name!r}: electric_capacity must be > 0")
        return out


@dataclass(frozen=True)
class StorageSpec:
    """Seasonal heat store. ``standing_loss_rate`` is the fraction of the
    state of charge lost per hour."""

    energy_capacity: float
    charge_power_cap: float = 50.0
    discharge_power_cap: float = 50.0
    charge_efficiency: float = 0.93
    discharge_efficiency: float = 0.93
    standing_loss_rate: float = 2e-5
    cyclic: bool = True
    initial_soc: float = 0.0

    def violations(self) -> list[str]:
        out = []
        if not (0 < self.charge_efficiency <= 1 and 0 < self.discharge_efficiency <= 1):
            out.append("storage: efficiencies must lie in (0, 1]")
        if not (0 <= self.standing_loss_rate < 1):
            out.append("storage: standing_loss_rate must lie in [0, 1)")
        if not self.energy_capacity >= 0:
            out.append("storage: energy_capacity must be >= 0")
        if not (self.charge_power_cap >= 0 and self.discharge_power_cap >= 0):
            out.append("storage: power caps must be >= 0")
        if not (0 <= self.initial_soc <= self.energy_capacity):
            out.append("storage: initial_soc outside [0, energy_capacity]")
        for value in (self.energy_capacity, self.charge_power_cap, self.discharge_power_cap):
            if not math.isfinite(value):
                out.append("storage: capacities must be finite")
                break
        return out


@dataclass(frozen=True)
class CarrierFlow:
    timestep: int
    carrier: str
    technology: str
    value: float  # MW; energy is value * step
    role: str = field(default="output")


# -- operations ------------------------------------------------------------

def convert(tech: TechnologySpec, fuel_power: float) -> tuple[float, float]:
    """Electric and thermal output (MW) for a fuel input (MW)."""
    if fuel_power < 0:
        raise DomainError(f"fuel power must be >= 0, got {fuel_power}")
    return tech.eta_el * fuel_power, tech.eta_th * fuel_power


def emission_rate(tech: TechnologySpec, electric: float, thermal: float) -> float:
    """Emissions in t/h for an output pair produced by one fuel input."""
    if electric < 0 or thermal < 0:
        raise DomainError("outputs must be >= 0")
    if tech.eta_el > 0 and tech.eta_th > 0:
        fuel_a = electric / tech.eta_el
        fuel_b = thermal / tech.eta_th
        if abs(fuel_a - fuel_b) > 1e-9 * max(1.0, fuel_a, fuel_b):
            raise DomainError(
                f"{tech.name}: outputs ({electric}, {thermal}) do not come from a single fuel input")
    elif tech.eta_el == 0 and electric > 1e-12:
        raise DomainError(f"{tech.name}: unit has no electric output")
    elif tech.eta_th == 0 and thermal > 1e-12:
        raise DomainError(f"{tech.name}: unit has no thermal output")
    basis = electric if tech.emission_basis == "electric_output" else thermal
    return tech.emission_intensity * basis


def fuel_cost_rate(fuel: FuelSpec, fuel_power: float) -> float:
    """Fuel cost in CHF/h; negative for gate-fee fuels such as waste."""
    if fuel_power < 0:
        raise DomainError(f"fuel power must be >= 0, got {fuel_power}")
    kwh_per_hour = fuel_power * 1000.0
    if fuel.cost_per_kwh is not None:
        return fuel.cost_per_kwh * kwh_per_hour
    if fuel.cost_per_kg is None:
        raise ConfigError(f"fuel {fuel.name!r} has no cost")
    if not fuel.lower_heating_value:
        raise ConfigError(f"fuel {fuel.name!r} is priced per kg but has no lower heating value")
    return fuel.cost_per_kg * kwh_per_hour / fuel.lower_heating_value


def storage_step(soc: float, charge: float, discharge: float, spec: StorageSpec, dt: float) -> float:
    """State of charge after one step. No clamping: feasibility is the caller's job."""
    return ((1.0 - spec.standing_loss_rate * dt) * soc
            + dt * (spec.charge_efficiency * charge - discharge / spec.discharge_efficiency))

"""Weather ingestion and aggregate demand profile synthesis.

City heat demand is spread over the year with heating degree-hours plus a
flat domestic-hot-water share; electricity follows a deterministic
daily x seasonal cosine modulation. Everything is normalised so that the
profile integrates exactly to the configured annual totals.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import IO, Optional, Union

import numpy as np

from .errors import ConfigError, DataError, DomainError

MAX_GAP_HOURS = 3.0
TEMPERATURE_BAND = (-50.0, 60.0)


class WeatherParseError(DataError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TemperatureSeries:
    start: datetime
    step: float  # hours
    values: np.ndarray  # deg C

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        lo, hi = TEMPERATURE_BAND
        if self.values.size and (np.nanmin(self.values) < lo or np.nanmax(self.values) > hi):
            raise DataError(f"temperatures outside sanity band [{lo}, {hi}] degC")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def hours(self) -> float:
        return len(self.values) * self.step


@dataclass(frozen=True)
class DemandProfile:
    carrier: str
    step: float
    values: np.ndarray  # MW
    annual_total: float = field(default=math.nan)  # MWh over the horizon

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        if self.carrier not in ("heat", "electricity"):
            raise DomainError(f"unknown carrier {self.carrier!r}")
        if not np.all(np.isfinite(self.values)):
            raise DataError(f"{self.carrier} profile contains non-finite values")
        if np.any(self.values < 0):
            raise DataError(f"{self.carrier} profile contains negative values")
        total = float(self.values.sum() * self.step)
        if math.isnan(self.annual_total):
            object.__setattr__(self, "annual_total", total)
        elif abs(total - self.annual_total) > 1e-9 * max(1.0, abs(self.annual_total)):
            raise DataError(
                f"{self.carrier} profile sums to {total} MWh, declared {self.annual_total}")

    def __len__(self) -> int:
        return len(self.values)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("timestep,mw\n")
        for t, v in enumerate(self.values):
            buf.write(f"{t},{v:.6f}\n")
        return buf.getvalue()


@dataclass(frozen=True)
class DemandConfig:
    """Annual totals in MWh, temperatures in degC.

    The electricity shape is ``(1 + daily_amplitude * cos(2 pi (h - peak_hour) / 24))
    * (1 + seasonal_amplitude * cos(2 pi (d - peak_day) / 365))``.
    """

    annual_space_heating: float
    annual_dhw: float
    annual_electricity: float
    dhn_share: float
    base_temperature: float = 15.0
    daily_amplitude: float = 0.25
    seasonal_amplitude: float = 0.10
    peak_hour: float = 18.0
    peak_day: float = 15.0
    network_loss_factor: float = 0.0

    def violations(self) -> list[str]:
        out = []
        for label in ("annual_space_heating", "annual_dhw", "annual_electricity"):
            value = getattr(self, label)
            if not (math.isfinite(value) and value >= 0):
                out.append(f"demand: {label} must be finite and >= 0")
        if not (0 < self.dhn_share <= 1):
            out.append(f"demand: dhn_share={self.dhn_share} outside (0, 1]")
        if not (0 <= self.daily_amplitude < 1 and 0 <= self.seasonal_amplitude < 1):
            out.append("demand: electricity amplitudes must lie in [0, 1)")
        if not (self.network_loss_factor >= 0):
            out.append("demand: network_loss_factor must be >= 0")
        return out

    @property
    def annual_heat(self) -> float:
        return self.annual_space_heating + self.annual_dhw


# -- weather ----------------------------------------------------------------

def load_weather(source: Union[bytes, str, IO], format: str = "csv") -> TemperatureSeries:
    """Parse a ``timestamp,temperature_c`` CSV.

    Missing samples (absent rows or empty temperature cells) spanning at
    most three hours are filled by linear interpolation; longer gaps raise
    :class:`DataError`.
    """
    if format != "csv":
        raise DomainError(f"unsupported weather format {format!r}")
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise WeatherParseError("empty weather file", 1) from None
    if [h.strip().lstrip("﻿") for h in header] != ["timestamp", "temperature_c"]:
        raise WeatherParseError("expected header 'timestamp,temperature_c'", 1)

    stamps: list[datetime] = []
    temps: list[float] = []
    lines: list[int] = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise WeatherParseError(f"expected 2 fields, got {len(row)}", lineno)
        try:
            ts = datetime.fromisoformat(row[0].strip())
        except ValueError:
            raise WeatherParseError(f"bad timestamp {row[0]!r}", lineno) from None
        cell = row[1].strip()
        if cell == "" or cell.lower() == "nan":
            value = math.nan
        else:
            try:
                value = float(cell)
            except ValueError:
                raise WeatherParseError(f"bad temperature {cell!r}", lineno) from None
        stamps.append(ts)
        temps.append(value)
        lines.append(lineno)
    if not stamps:
        raise WeatherParseError("no data rows", 2)

    step = 1.0
    if len(stamps) > 1:
        step = min((b - a).total_seconds() for a, b in zip(stamps, stamps[1:])) / 3600.0
        if step <= 0:
            raise WeatherParseError("timestamps must be strictly increasing", lines[1])
    start = stamps[0]
    n = int(round((stamps[-1] - start).total_seconds() / 3600.0 / step)) + 1
    grid = np.full(n, np.nan)
    for ts, value, lineno in zip(stamps, temps, lines):
        pos = (ts - start).total_seconds() / 3600.0 / step
        k = int(round(pos))
        if abs(pos - k) > 1e-6:
            raise WeatherParseError("timestamp off the fixed step grid", lineno)
        if k > 0 and stamps and not np.isnan(grid[k]):
            raise WeatherParseError("duplicate timestamp", lineno)
        grid[k] = value

    missing = np.isnan(grid)
    if missing.any():
        if missing[0] or missing[-1]:
            raise DataError("weather series starts or ends with a missing value")
        run = 0
        for k, miss in enumerate(missing):
            run = run + 1 if miss else 0
            if run * step > MAX_GAP_HOURS:
                when = start + timedelta(hours=k * step)
                raise DataError(f"weather gap longer than {MAX_GAP_HOURS:g} h ending at {when.isoformat()}")
        idx = np.arange(n)
        grid[missing] = np.interp(idx[missing], idx[~missing], grid[~missing])
    return TemperatureSeries(start, step, grid)


def synthetic_weather(start: datetime = datetime(2023, 1, 1), hours: int = 8760, step: float = 1.0,
                      mean: float = 9.5, amplitude: float = 9.0, daily_ripple: float = 3.0,
                      coldest_day: float = 15.0, coldest_hour: float = 5.0,
                      noise_std: float = 0.0, noise_autocorr: float = 0.8,
                      seed: Optional[int] = None) -> TemperatureSeries:
    """Sinusoidal annual cycle with a daily ripple.

    With ``noise_std > 0`` a day-to-day weather anomaly is added: an AR(1)
    series of daily values (stationary standard deviation ``noise_std``,
    lag-one correlation ``noise_autocorr``) interpolated linearly between
    noons, drawn from ``numpy.random.default_rng(seed)``.
    """
    n = int(round(hours / step))
    t = np.arange(n) * step
    day = t / 24.0
    hour = np.mod(t, 24.0)
    values = (mean
              - amplitude * np.cos(2 * np.pi * (day - coldest_day) / 365.0)
              - daily_ripple * np.cos(2 * np.pi * (hour - coldest_hour) / 24.0))
    if noise_std > 0:
        if not (0 <= noise_autocorr < 1):
            raise ConfigError("noise_autocorr must lie in [0, 1)")
        rng = np.random.default_rng(seed)
        n_days = int(math.ceil(hours / 24.0)) + 2
        shocks = rng.normal(0.0, noise_std * math.sqrt(1 - noise_autocorr ** 2), size=n_days)
        daily = np.empty(n_days)
        daily[0] = rng.normal(0.0, noise_std)
        for k in range(1, n_days):
            daily[k] = noise_autocorr * daily[k - 1] + shocks[k]
        noons = np.arange(n_days) * 24.0 - 12.0
        values = values + np.interp(t, noons, daily)
    return TemperatureSeries(start, step, values)


# -- profiles ---------------------------------------------------------------

def degree_weights(temps: Union[TemperatureSeries, np.ndarray], base: float = 15.0) -> np.ndarray:
    values = temps.values if isinstance(temps, TemperatureSeries) else np.asarray(temps, dtype=float)
    return np.maximum(0.0, base - values)


def synth_heat(config: DemandConfig, weights, step: float = 1.0) -> DemandProfile:
    w = np.asarray(weights, dtype=float)
    h = len(w)
    if h == 0:
        raise ConfigError("empty weight sequence")
    total_w = float(w.sum())
    values = np.full(h, config.annual_dhw / (h * step))
    if config.annual_space_heating > 0:
        if total_w <= 0:
            raise ConfigError("space-heating demand is non-zero but all degree weights are zero")
        values = values + config.annual_space_heating * w / (total_w * step)
    return DemandProfile("heat", step, values, config.annual_space_heating + config.annual_dhw)


def electricity_shape(config: DemandConfig, horizon: int, step: float = 1.0) -> np.ndarray:
    if not (0 <= config.daily_amplitude < 1 and 0 <= config.seasonal_amplitude < 1):
        raise ConfigError("electricity amplitudes must lie in [0, 1) to keep the profile positive")
    t = np.arange(horizon) * step
    daily = 1 + config.daily_amplitude * np.cos(2 * np.pi * (np.mod(t, 24.0) - config.peak_hour) / 24.0)
    seasonal = 1 + config.seasonal_amplitude * np.cos(2 * np.pi * (t / 24.0 - config.peak_day) / 365.0)
    return daily * seasonal


def synth_electricity(config: DemandConfig, horizon: int, step: float = 1.0) -> DemandProfile:
    if config.annual_electricity < 0:
        raise ConfigError("annual electricity must be >= 0")
    shape = electricity_shape(config, horizon, step)
    values = config.annual_electricity * shape / (shape.sum() * step)
    return DemandProfile("electricity", step, values, config.annual_electricity)


def apply_dhn_share(profile: DemandProfile, share: float) -> DemandProfile:
    if not (0 < share <= 1):
        raise DomainError(f"DHN share {share} outside (0, 1]")
    return DemandProfile(profile.carrier, profile.step, profile.values * share, profile.annual_total * share)


def apply_network_losses(profile: DemandProfile, loss_factor: float) -> DemandProfile:
    if loss_factor < 0:
        raise DomainError("loss factor must be >= 0")
    k = 1.0 + loss_factor
    return DemandProfile(profile.carrier, profile.step, profile.values * k, profile.annual_total * k)


def block_average(profile: DemandProfile, factor: int) -> DemandProfile:
    """Coarsen a profile by averaging consecutive blocks of ``factor`` steps."""
    if factor == 1:
        return profile
    h = len(profile.values)
    if factor < 1 or h % factor:
        raise DomainError(f"cannot split {h} steps into blocks of {factor}")
    values = profile.values.reshape(-1, factor).mean(axis=1)
    return DemandProfile(profile.carrier, profile.step * factor, values, profile.annual_total)

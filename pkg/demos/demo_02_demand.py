"""
From weather to network demand
==============================

City heat demand is spread over the year with heating-degree weights plus a
flat hot-water share, then scaled to the part of the city on the network.
"""
import numpy as np

from dhdispatch.config import calibrate_city_demand
from dhdispatch.demand import (DemandConfig, apply_dhn_share, block_average, degree_weights,
                               synth_electricity, synth_heat, synthetic_weather)

# The city total is backed out of the network's annual delivery.
city = calibrate_city_demand(189_000, 0.18, space_heating_fraction=0.90)
print("city heat %.0f GWh (%.0f space heating, %.0f hot water)"
      % (city.total / 1e3, city.space_heating / 1e3, city.dhw / 1e3))

weather = synthetic_weather(noise_std=3.0, seed=42)
print("weather: %d hours, mean %.1f C, min %.1f C, max %.1f C"
      % (len(weather), weather.values.mean(), weather.values.min(), weather.values.max()))

cfg = DemandConfig(city.space_heating, city.dhw, 1_000_000.0, 0.18, base_temperature=12.0)
heat = synth_heat(cfg, degree_weights(weather, cfg.base_temperature))
network = apply_dhn_share(heat, cfg.dhn_share)
print("network demand %.1f GWh, peak %.1f MW, summer floor %.1f MW"
      % (network.annual_total / 1e3, network.values.max(), network.values.min()))

# Monthly energy, a coarse view of the seasonal swing the store has to bridge.
days = np.cumsum([0, 31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31]) * 24
monthly = [network.values[a:b].sum() / 1e3 for a, b in zip(days[:-1], days[1:])]
print("monthly GWh:", np.round(monthly, 1))

# Coarser steps keep the annual total.
coarse = block_average(network, 3)
print("3-hour profile: %d steps, %.1f GWh" % (len(coarse.values), coarse.annual_total / 1e3))

el = synth_electricity(cfg, len(weather))
print("electricity: %.0f GWh, peak/trough %.2f" % (el.annual_total / 1e3, el.values.max() / el.values.min()))

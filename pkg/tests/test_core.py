import math

import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from dhdispatch.core import (FuelSpec, StorageSpec, SteamTurbineSpec, TechnologySpec, chf_per_mwh_to_rp_per_kwh,
                             convert, emission_rate, fuel_cost_rate, g_per_kwh_to_t_per_mwh,
                             rp_per_kwh_to_chf_per_mwh, storage_step, t_per_mwh_to_g_per_kwh)
from dhdispatch.errors import ConfigError, DomainError

from builders import GAS, WASTE, WOOD, gas_turbine, wood_boiler, wte

powers = st.floats(min_value=0, max_value=1e4, allow_nan=False)
scales = st.floats(min_value=0, max_value=100, allow_nan=False)


class TestFuelSpec:
    def test_energy_cap_from_mass_and_lhv(self):
        # 110 000 t at 3.3 kWh/kg is 363 000 MWh
        assert_allclose(WASTE.annual_energy_cap, 363_000.0)
        assert GAS.annual_energy_cap is None

    def test_cost_per_mwh(self):
        assert_allclose(GAS.cost_per_mwh, 100.0)
        assert_allclose(WASTE.cost_per_mwh, -300.0 / 3.3)
        assert_allclose(WOOD.cost_per_mwh, 60.0)

    def test_exactly_one_cost_basis(self):
        assert FuelSpec("x", 1.0, cost_per_kg=1.0, cost_per_kwh=1.0).violations()
        assert FuelSpec("x").violations()
        assert not GAS.violations()

    def test_mass_quantities_need_lhv(self):
        bad = FuelSpec("x", cost_per_kwh=0.1, annual_mass_cap=10.0)
        assert any("heating value" in v for v in bad.violations())


class TestTechnologySpec:
    def test_table_rows_are_valid(self):
        for tech in (wte(), gas_turbine(), wood_boiler()):
            assert tech.violations() == []

    def test_efficiency_sum_above_one(self):
        tech = TechnologySpec("hot", GAS, 0.6, 0.6, electric_capacity=1.0)
        problems = tech.violations()
        assert len(problems) == 1 and "hot" in problems[0]

    def test_electric_unit_needs_capacity(self):
        assert TechnologySpec("x", GAS, 0.3, 0.5).violations()

    def test_capacity_basis(self):
        assert wte().capacity_basis == "electric"
        assert_allclose(wte().max_fuel_power, 80.0)
        assert wood_boiler(32.0).capacity_basis == "thermal"
        assert_allclose(wood_boiler(32.0).max_fuel_power, 32.0 / 0.86)

    def test_steam_turbine_invariant(self):
        assert SteamTurbineSpec(27.0, 0.07, 0.70).violations() == []
        assert SteamTurbineSpec(27.0, 0.5, 0.7).violations()


class TestConvert:
    def test_wte_saturates_at_capacity(self):
        assert_allclose(convert(wte(), 80.0), (16.0, 36.0))

    def test_gas_turbine(self):
        assert_allclose(convert(gas_turbine(), 100.0), (35.0, 53.0))

    def test_zero(self):
        assert convert(wood_boiler(), 0.0) == (0.0, 0.0)

    def test_negative_input(self):
        with pytest.raises(DomainError):
            convert(wte(), -1.0)

    @given(powers)
    def test_conserves_energy(self, fuel):
        for tech in (wte(), gas_turbine(), wood_boiler()):
            el, th = convert(tech, fuel)
            assert el + th <= fuel * (1 + 1e-12)


class TestEmissionRate:
    def test_wte_full_load(self):
        assert_allclose(emission_rate(wte(), 16.0, 36.0), 12.4)

    def test_wood_boiler_thermal_basis(self):
        assert_allclose(emission_rate(wood_boiler(), 0.0, 10.0), 0.27)

    def test_zero_output(self):
        assert emission_rate(gas_turbine(), 0.0, 0.0) == 0.0

    def test_inconsistent_pair(self):
        with pytest.raises(DomainError):
            emission_rate(wte(), 16.0, 10.0)

    @given(powers, scales)
    def test_positively_homogeneous(self, fuel, k):
        tech = gas_turbine()
        base = emission_rate(tech, *convert(tech, fuel))
        assert_allclose(emission_rate(tech, *convert(tech, k * fuel)), k * base, rtol=1e-9, atol=1e-9)


class TestFuelCostRate:
    def test_gas_per_kwh(self):
        assert_allclose(fuel_cost_rate(GAS, 100.0), 10_000.0)

    def test_waste_gate_fee_is_revenue(self):
        assert_allclose(fuel_cost_rate(WASTE, 80.0), -80_000.0 / 3.3 * 0.30)
        assert_allclose(fuel_cost_rate(WASTE, 80.0), -7272.7, rtol=1e-4)

    def test_zero(self):
        assert fuel_cost_rate(WOOD, 0.0) == 0.0

    def test_per_kg_without_lhv(self):
        with pytest.raises(ConfigError):
            fuel_cost_rate(FuelSpec("peat", cost_per_kg=0.1), 1.0)

    @given(powers, scales)
    def test_positively_homogeneous(self, fuel, k):
        assert_allclose(fuel_cost_rate(WASTE, k * fuel), k * fuel_cost_rate(WASTE, fuel), rtol=1e-9, atol=1e-6)


class TestStorageStep:
    def test_lossless_charge(self):
        spec = StorageSpec(5000.0, charge_efficiency=1.0, discharge_efficiency=1.0, standing_loss_rate=0.0)
        assert_allclose(storage_step(1000.0, 50.0, 0.0, spec, 1.0), 1050.0)

    def test_idle_identity(self):
        spec = StorageSpec(5000.0, standing_loss_rate=0.0)
        assert storage_step(1000.0, 0.0, 0.0, spec, 1.0) == 1000.0

    def test_lossy_round_trip(self):
        spec = StorageSpec(5000.0, 200.0, 200.0, 0.9, 0.9, 1e-4)
        assert_allclose(storage_step(1000.0, 100.0, 40.0, spec, 1.0), 0.9999 * 1000 + 90 - 40 / 0.9)

    @given(st.floats(0, 1e4), st.floats(0, 0.04), st.floats(0.1, 24))
    def test_idle_contracts_by_loss(self, soc, loss, dt):
        spec = StorageSpec(1e4, standing_loss_rate=loss)
        assert_allclose(storage_step(soc, 0.0, 0.0, spec, dt), (1 - loss * dt) * soc)

    def test_invalid_spec(self):
        assert StorageSpec(100.0, charge_efficiency=0.0).violations()
        assert StorageSpec(100.0, standing_loss_rate=1.0).violations()


class TestUnits:
    def test_rappen_per_kwh(self):
        assert rp_per_kwh_to_chf_per_mwh(10.0) == 100.0

    def test_grams_per_kwh(self):
        assert_allclose(g_per_kwh_to_t_per_mwh(775.0), 0.775)

    @given(st.floats(-1e6, 1e6, allow_nan=False))
    def test_round_trips(self, x):
        assert math.isclose(chf_per_mwh_to_rp_per_kwh(rp_per_kwh_to_chf_per_mwh(x)), x, rel_tol=1e-12, abs_tol=1e-300)
        assert math.isclose(t_per_mwh_to_g_per_kwh(g_per_kwh_to_t_per_mwh(x)), x, rel_tol=1e-12, abs_tol=1e-300)

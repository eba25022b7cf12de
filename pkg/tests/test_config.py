import dataclasses

import pytest
from numpy.testing import assert_allclose

from dhdispatch.config import (DEFAULT_BACKGROUND, calibrate_city_demand, format_config, load_config,
                               parse_config, reference_config_path, validate_scenario)
from dhdispatch.errors import ConfigError, DomainError

MINIMAL = """
[scenario]
id = tiny

[demand]
dhn_share = 0.25
city_heat_mwh = 400000
"""


def reference(name):
    return load_config(reference_config_path(name))


class TestCalibration:
    def test_reference_year(self):
        city = calibrate_city_demand(189_000, 0.18)
        assert_allclose(city.total, 1_050_000)
        assert_allclose(city.space_heating + city.dhw, city.total)
        assert_allclose(city.space_heating / city.total, 0.85)

    def test_expanded_network_cross_check(self):
        total = calibrate_city_demand(523_000, 0.50).total
        assert_allclose(total, 1_046_000)
        assert abs(total / 1_050_000 - 1) < 0.01

    def test_full_share_is_identity(self):
        assert calibrate_city_demand(1234.5, 1.0).total == 1234.5

    @pytest.mark.parametrize("share", [0.0, -0.1, 1.5])
    def test_share_domain(self, share):
        with pytest.raises(DomainError):
            calibrate_city_demand(100.0, share)


class TestShippedConfigs:
    def test_scenario1(self):
        cfg = reference("scenario1")
        assert cfg.demand.dhn_share == 0.18
        assert cfg.storage is None
        assert_allclose(cfg.city_heat_mwh, 1_050_000)
        assert validate_scenario(cfg) == []

    @pytest.mark.parametrize("name", ["scenario2", "scenario3"])
    def test_storage_scenarios(self, name):
        cfg = reference(name)
        assert validate_scenario(cfg) == []
        assert_allclose(cfg.storage.energy_capacity, 15_000)

    def test_scenario3_scale_up(self):
        s1, s3 = reference("scenario1"), reference("scenario3")
        assert s3.demand.dhn_share == 0.5
        assert_allclose(s3.technologies["wb"].thermal_capacity, 5 * s1.technologies["wb"].thermal_capacity)

    def test_table_values(self):
        techs = reference("scenario1").technologies
        assert (techs["wte"].electric_capacity, techs["wte"].eta_el, techs["wte"].eta_th) == (16.0, 0.20, 0.45)
        assert (techs["gt"].electric_capacity, techs["gt"].eta_el, techs["gt"].eta_th) == (46.0, 0.35, 0.53)
        assert_allclose(techs["wte"].emission_intensity, 0.775)
        assert techs["wte"].min_load_fraction == 0.5


class TestParse:
    def test_minimal_defaults(self):
        cfg = parse_config(MINIMAL)
        assert cfg.id == "tiny"
        assert cfg.kind == "custom"
        assert cfg.background == DEFAULT_BACKGROUND
        assert validate_scenario(cfg) == []

    def test_bytes_and_text_agree(self):
        assert parse_config(MINIMAL.encode()) == parse_config(MINIMAL)

    def test_empty_file_lists_required_keys(self):
        with pytest.raises(ConfigError) as err:
            parse_config(b"")
        for key in ("scenario.id", "demand.dhn_share", "demand.city_heat_mwh"):
            assert key in str(err.value)

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match="stroage"):
            parse_config(MINIMAL + "\n[stroage]\nenabled = true\n")

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="run.stpe_hours"):
            parse_config(MINIMAL + "\n[run]\nstpe_hours = 3\n")

    def test_bad_number_names_path(self):
        with pytest.raises(ConfigError, match="demand.dhn_share"):
            parse_config(MINIMAL.replace("0.25", "a quarter"))

    def test_efficiency_sum(self):
        text = MINIMAL + "\n[technology.gas_turbine]\neta_el = 0.6\neta_th = 0.6\n"
        with pytest.raises(ConfigError) as err:
            parse_config(text)
        assert "eta_el + eta_th = 1.2" in str(err.value)

    def test_one_violation_for_efficiency_sum(self):
        cfg = parse_config(MINIMAL)
        gt = dataclasses.replace(cfg.technologies["gt"], eta_el=0.6, eta_th=0.6)
        bad = dataclasses.replace(cfg, technologies={**cfg.technologies, "gt": gt})
        assert len(validate_scenario(bad)) == 1

    def test_zero_share(self):
        with pytest.raises(ConfigError):
            parse_config(MINIMAL.replace("0.25", "0"))

    def test_storage_scenario_without_storage(self):
        with pytest.raises(ConfigError, match="requires a storage"):
            parse_config(MINIMAL.replace("id = tiny", "id = tiny\nkind = 2"))

    def test_background_fractions(self):
        with pytest.raises(ConfigError, match="fractions sum"):
            parse_config(MINIMAL + "\n[background.oil]\nfraction = 0.5\n")

    def test_horizon_multiple_of_step(self):
        with pytest.raises(ConfigError, match="multiple"):
            parse_config(MINIMAL + "\n[run]\nhorizon_hours = 100\nstep_hours = 3\n")

    @pytest.mark.parametrize("name", ["scenario1", "scenario2", "scenario3"])
    def test_format_round_trip(self, name):
        cfg = reference(name)
        again = parse_config(format_config(cfg))
        # the resolved file has multipliers and calibration folded in
        for field in ("technologies", "fuels", "storage", "grid", "demand", "run", "weather"):
            assert getattr(again, field) == getattr(cfg, field), field
        assert_allclose(again.city_heat_mwh, cfg.city_heat_mwh)
        assert format_config(again) == format_config(cfg)

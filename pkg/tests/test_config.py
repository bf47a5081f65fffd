import math
from importlib import resources

import pytest

from biphoton.config import (
    ConfigError,
    default_config,
    dump_effective_config,
    load_config,
    load_config_with_dump,
    parse_config,
)


def test_empty_file_gives_defaults(tmp_path):
    p = tmp_path / "empty.ini"
    p.write_text("")
    assert load_config(p) == default_config()
    assert load_config(None) == default_config()


def test_defaults_resolve_derived_values(config):
    assert math.degrees(config.crystal.cut_angle) == pytest.approx(36.43803859, abs=1e-7)
    assert math.degrees(config.grating.theta0) == pytest.approx(22.9545, abs=1e-4)
    assert config.grating.gamma == 1.05
    assert config.target_waist == 48e-6
    assert config.detection_bandwidth == pytest.approx(2 * math.pi * 3.2e12)


def test_override_shows_in_dump(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[grating]\ngroove_density_per_mm = 1200\n")
    cfg, dump = load_config_with_dump(p)
    assert cfg.grating.groove_density == pytest.approx(1200e3)
    assert "groove_density_per_mm = 1200\n" in dump
    assert "gamma = 1.05  # default" in dump


def test_dump_round_trips(tmp_path):
    p = tmp_path / "c.ini"
    p.write_text("[pump]\nwaist_um = 40\n[crystal]\ncut_angle_deg = 36.5\n")
    cfg, dump = load_config_with_dump(p)
    q = tmp_path / "effective.ini"
    q.write_text(dump)
    assert load_config(q) == cfg


def test_invalid_numerical_aperture():
    with pytest.raises(ConfigError, match="numerical_aperture"):
        parse_config("[fiber]\nnumerical_aperture = 1.5\n")


def test_bad_number_reports_line():
    with pytest.raises(ConfigError, match=r":3: pump.waist_um"):
        parse_config("[pump]\nwavelength_nm = 325\nwaist_um = wide\n")


def test_unknown_key_reports_line():
    with pytest.raises(ConfigError, match=r":2:.*wiast_um"):
        parse_config("[pump]\nwiast_um = 30\n")


def test_unknown_section():
    with pytest.raises(ConfigError, match="laser"):
        parse_config("[laser]\npower = 1\n")


def test_syntax_error():
    with pytest.raises(ConfigError):
        parse_config("waist_um = 3\n")


def test_bad_choice():
    with pytest.raises(ConfigError, match="walkoff_axis"):
        parse_config("[crystal]\nwalkoff_axis = z\n")


def test_packaged_default_matches_dump():
    text = resources.files("biphoton").joinpath("data/default.ini").read_text(encoding="utf-8")
    assert text == dump_effective_config()


def test_with_waist(config):
    c = config.with_waist(200e-6)
    assert c.target_waist == 200e-6
    assert c.pump.waist == pytest.approx(200e-6 / math.sqrt(2))
    assert c.fiber.magnification == pytest.approx(config.fiber.magnification * 200 / 48)
    assert c.grating == config.grating and c.crystal == config.crystal

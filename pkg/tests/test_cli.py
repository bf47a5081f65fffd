import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from biphoton.cli import main
from biphoton.config import default_config
from biphoton.designer import waist_sweep
from biphoton.spectra import bandwidth, initial_spectrum

SMALL_XMAP = "[grids]\nxmap_points = 80, 41\nsweep_waists_um = 100, 500\n"


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "small.ini"
    p.write_text(SMALL_XMAP)
    return p


def test_report(tmp_path):
    out = tmp_path / "o"
    assert main(["report", "--out", str(out), "--quiet"]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert set(rep["bandwidth_THz"]) == {"initial", "transformed_ideal", "transformed_anchored"}
    assert rep["central_ratio"]["ideal"] == pytest.approx(1.0, abs=1e-6)
    assert rep["anchored_efficiency_650nm_squared"] == pytest.approx(0.52**2, rel=1e-9)
    assert rep["resolved"]["gamma"] == 1.05
    assert (out / "effective_config.ini").exists()


def test_spectrum_then_g2_from_file(tmp_path):
    out = tmp_path / "o"
    assert main(["spectrum", "--out", str(out), "--efficiency", "ideal", "--quiet"]) == 0
    names = sorted(p.name for p in out.glob("spectrum_*.csv"))
    assert names == ["spectrum_initial.csv", "spectrum_transformed_ideal.csv"]
    header, data = read_csv(out / "spectrum_initial.csv")
    assert header == ["nu_THz", "rate_au", "amplitude_au"]
    meta = json.loads((out / "spectrum_initial.json").read_text())
    assert meta["bandwidth_THz"] == pytest.approx(bandwidth(initial_spectrum(default_config())) / 1e12, rel=1e-8)

    assert main(["g2", "--out", str(out), "--input", str(out / "spectrum_initial.csv"), "--quiet"]) == 0
    header, g = read_csv(out / "g2_spectrum_initial.csv")
    assert header == ["tau_fs", "g2"]
    np.testing.assert_allclose(g[:, 0], -g[::-1, 0], atol=1e-9)
    assert g[len(g) // 2, 1] == 1.0


def test_g2_computed(tmp_path):
    out = tmp_path / "o"
    assert main(["g2", "--out", str(out), "--quiet"]) == 0
    for name in ("g2_initial", "g2_transformed_ideal", "g2_transformed_anchored"):
        meta = json.loads((out / f"{name}.json").read_text())
        assert 0.4 <= meta["time_bandwidth_product"] <= 1.0


def test_sweep_waist_matches_designer(tmp_path, small_cfg):
    out = tmp_path / "o"
    assert main(["sweep-waist", "--config", str(small_cfg), "--out", str(out), "--quiet"]) == 0
    header, data = read_csv(out / "sweep_waist.csv")
    assert header == ["waist_um", "bandwidth_ideal_THz", "bandwidth_anchored_THz"]
    ref = waist_sweep(default_config(), [100e-6, 500e-6])
    np.testing.assert_allclose(data[:, 1], ref.objectives["bandwidth_ideal"] / 1e12, rtol=1e-8)
    np.testing.assert_allclose(data[:, 2], ref.objectives["bandwidth_anchored"] / 1e12, rtol=1e-8)


def test_xmap_small_grid(tmp_path, small_cfg):
    out = tmp_path / "o"
    assert main(["xmap", "--config", str(small_cfg), "--out", str(out), "--quiet"]) == 0
    _, d = read_csv(out / "xmap_initial.csv")
    assert d.shape == (80 * 41, 3)
    assert np.nanmax(d[:, 2]) == pytest.approx(1.0)
    meta = json.loads((out / "xmap.json").read_text())
    lo, hi = meta["branch_span_9p5deg_THz"]
    assert lo < 0 < hi
    lines = (out / "xmap_transformed_matrix.txt").read_text().splitlines()
    assert lines[0].startswith("# rows: theta_deg") and len(lines) == 2 + 41


def test_rate_sweep_and_optimize_gamma(tmp_path):
    out = tmp_path / "o"
    assert main(["rate-sweep", "--out", str(out), "--quiet"]) == 0
    assert -2.1 < json.loads((out / "rate_sweep.json").read_text())["loglog_slope"] < -1.9
    assert main(["optimize-gamma", "--out", str(out), "--quiet"]) == 0
    res = json.loads((out / "optimize_gamma.json").read_text())
    assert 1.0 < res["gamma_opt"] < 1.1 and not res["at_boundary"]


def test_rerun_from_effective_config_is_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["spectrum", "--out", str(a), "--quiet"]) == 0
    assert main(["spectrum", "--config", str(a / "effective_config.ini"), "--out", str(b), "--quiet"]) == 0
    for f in a.glob("*.csv"):
        assert f.read_bytes() == (b / f.name).read_bytes()


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[fiber]\nnumerical_aperture = 1.5\n")
    out = tmp_path / "o"
    assert main(["report", "--config", str(bad), "--out", str(out), "--quiet"]) == 2
    err = json.loads((out / "error.json").read_text())
    assert err["exit_code"] == 2 and "numerical_aperture" in err["message"]
    assert "numerical_aperture" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["report", "--config", str(tmp_path / "nope.ini"), "--out", str(tmp_path / "o"), "--quiet"]) == 2


def test_numerical_error_exit_code(tmp_path):
    spec = tmp_path / "dip.csv"
    nu = np.linspace(-10, 10, 21)
    spec.write_text("nu_THz,rate_au\n" + "".join(f"{x},{abs(x)}\n" for x in nu))
    out = tmp_path / "o"
    assert main(["g2", "--input", str(spec), "--out", str(out), "--quiet"]) == 3
    assert json.loads((out / "error.json").read_text())["exit_code"] == 3
    assert not (out / "effective_config.ini").exists()


def test_console_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "biphoton.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for name in ("xmap", "spectrum", "g2", "sweep-waist", "optimize-gamma", "rate-sweep", "report"):
        assert name in r.stdout

import math
import warnings

import numpy as np
import pytest

from biphoton.designer import (
    BoundaryWarning,
    SmallWaistWarning,
    SweepResult,
    golden_section_max,
    optimize_gamma,
    peak_rate,
    rate_vs_waist,
    waist_sweep,
)
from biphoton.spectra import bandwidth, transformed_spectrum


def test_golden_section_on_parabola():
    x, fx, hist = golden_section_max(lambda g: -(g - 1.0371) ** 2, 0.9, 1.2, 1e-6)
    assert x == pytest.approx(1.0371, abs=1e-6)
    assert fx == pytest.approx(0.0, abs=1e-11)
    # bracket shrinks by 0.618 per evaluation
    assert len(hist) <= math.ceil(math.log(1e-6 / 0.3) / math.log(0.618)) + 4


def test_golden_section_bad_bracket():
    with pytest.raises(ValueError):
        golden_section_max(lambda g: g, 1.0, 1.0)


def test_sweep_axis_validation():
    with pytest.raises(ValueError):
        SweepResult("w", "m", np.array([2.0, 1.0]), {})
    with pytest.raises(ValueError):
        SweepResult("w", "m", np.array([1.0, 2.0]), {"a": np.zeros(3)})


@pytest.fixture(scope="module")
def gamma_result(config):
    with warnings.catch_warnings():
        warnings.simplefilter("error", BoundaryWarning)
        return optimize_gamma(config)


def test_gamma_is_a_local_maximum(gamma_result, config):
    g = gamma_result.gamma
    assert 0.95 < g < 1.15 and not gamma_result.at_boundary
    best = gamma_result.bandwidth
    for other in (g - 0.1, g + 0.1):
        assert bandwidth(transformed_spectrum(config.with_gamma(other), "ideal")) < best


def test_gamma_stable_under_tighter_tolerance(gamma_result, config):
    tighter = optimize_gamma(config, tol=config.grids.gamma_tol / 2)
    assert abs(tighter.gamma - gamma_result.gamma) < 1e-3


def test_gamma_boundary_warning(config):
    with pytest.warns(BoundaryWarning):
        res = optimize_gamma(config, bracket=(0.90, 0.95), tol=5e-3)
    assert res.at_boundary


def test_rate_quadruples_when_waist_halves(config):
    r1 = peak_rate(config.with_waist(150e-6))
    r2 = peak_rate(config.with_waist(300e-6))
    assert r1 / r2 == pytest.approx(4.0, rel=0.05)


def test_rate_sweep_matches_direct_calls(config):
    res = rate_vs_waist(config, [100e-6, 250e-6, 500e-6])
    direct = [peak_rate(config.with_waist(w)) for w in res.values]
    np.testing.assert_array_equal(res.objectives["peak_rate"], direct)
    assert -2.2 < res.extras["slope"] < -1.8


@pytest.fixture(scope="module")
def sweep(config):
    with pytest.warns(SmallWaistWarning):
        return waist_sweep(config, [100e-6, 48e-6, 500e-6, 200e-6])


def test_sweep_sorted_and_order_independent(sweep, config):
    np.testing.assert_allclose(sweep.values, [48e-6, 100e-6, 200e-6, 500e-6])
    with pytest.warns(SmallWaistWarning):
        again = waist_sweep(config, [500e-6, 200e-6, 100e-6, 48e-6], workers=2)
    for k in sweep.objectives:
        np.testing.assert_array_equal(sweep.objectives[k], again.objectives[k])


def test_anchored_never_exceeds_ideal(sweep):
    assert np.all(sweep.objectives["bandwidth_anchored"] <= sweep.objectives["bandwidth_ideal"])


def test_bandwidth_grows_with_waist(sweep):
    for k, v in sweep.objectives.items():
        assert np.all(np.diff(v) > 0), k


def test_sweep_row_matches_single_run(sweep, config):
    b = bandwidth(transformed_spectrum(config.with_waist(500e-6), "ideal"))
    assert sweep.objectives["bandwidth_ideal"][-1] == b


def test_small_waist_warning(config):
    with pytest.warns(SmallWaistWarning):
        waist_sweep(config, [60e-6], modes=("ideal",))
    with warnings.catch_warnings():
        warnings.simplefilter("error", SmallWaistWarning)
        waist_sweep(config, [150e-6], modes=("ideal",))

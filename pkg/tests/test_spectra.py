import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biphoton.optics import DomainError
from biphoton.spectra import (
    Spectrum,
    bandwidth,
    central_value,
    correlation_function,
    correlation_time,
    initial_spectrum,
    time_bandwidth_product,
    transformed_spectra,
)

DNU = 0.5e12


def rect(points_inside=91, n=1001):
    nu = (np.arange(n) - n // 2) * DNU
    r = np.where(np.abs(nu) <= (points_inside // 2) * DNU, 1.0, 0.0)
    return Spectrum(nu, r), points_inside * DNU


def gaussian(sigma=20e12, n=2001, offset=0.0):
    nu = (np.arange(n) - n // 2) * DNU + offset
    return Spectrum(nu, np.exp(-nu**2 / (2 * sigma**2)))


def test_rect_bandwidth_exact():
    s, b = rect()
    assert bandwidth(s) == pytest.approx(b, rel=1e-12)


def test_rect_correlation_time_exact():
    s, b = rect()
    assert correlation_time(correlation_function(s)) == pytest.approx(1 / b, rel=1e-3)


def test_rect_g2_is_sinc_squared_with_zero_at_inverse_width():
    s, b = rect()
    g = correlation_function(s, padding=9)  # 9009 = 99 * 91 puts tau = 1/B on the grid
    k = np.argmin(np.abs(g.tau - 1 / b))
    assert g.tau[k] == pytest.approx(1 / b, rel=1e-12)
    assert g.g2[k] < 1e-20
    near = np.abs(g.tau) < 0.8 / b
    expected = np.sinc(b * g.tau[near]) ** 2
    np.testing.assert_allclose(g.g2[near], expected, atol=1e-3)


def test_gaussian_oracles():
    sigma = 20e12
    s = gaussian(sigma)
    assert bandwidth(s) == pytest.approx(math.sqrt(2 * math.pi) * sigma, rel=1e-4)
    dt = correlation_time(correlation_function(s))
    assert dt == pytest.approx(1 / (math.sqrt(8 * math.pi) * sigma), rel=1e-4)
    assert bandwidth(s) * dt == pytest.approx(0.5, rel=1e-3)


def test_central_value_interpolated_off_grid():
    sigma = 20e12
    s = gaussian(sigma, offset=DNU / 2)
    assert not np.any(s.nu == 0)
    assert central_value(s) == pytest.approx(1.0, rel=1e-6)
    assert bandwidth(s) == pytest.approx(math.sqrt(2 * math.pi) * sigma, rel=1e-4)


def test_zero_center_is_an_error():
    nu = np.linspace(-10, 10, 21)
    with pytest.raises(DomainError):
        bandwidth(Spectrum(nu, np.abs(nu)))


def test_grid_must_be_uniform():
    with pytest.raises(ValueError):
        Spectrum(np.array([0.0, 1.0, 3.0]), np.ones(3))
    with pytest.raises(ValueError):
        Spectrum(np.array([0.0, 1.0, 2.0]), np.array([1.0, -1.0, 1.0]))


@settings(max_examples=40, deadline=None)
@given(scale=st.floats(1e-30, 1e30))
def test_metrics_scale_free(scale):
    s = gaussian(15e12, n=801)
    t = s.scaled(scale)
    assert bandwidth(t) == pytest.approx(bandwidth(s), rel=1e-12)
    assert correlation_time(correlation_function(t)) == pytest.approx(
        correlation_time(correlation_function(s)), rel=1e-12
    )


def test_tau_grid_symmetric():
    s, _ = rect(n=1000)
    g = correlation_function(s)
    assert g.tau.size % 2 == 1 and g.tau.size >= 8000
    np.testing.assert_allclose(g.tau, -g.tau[::-1], rtol=0, atol=1e-30)
    assert g.g2[g.tau.size // 2] == 1.0


def test_sqrt_fallback_without_amplitude():
    s = gaussian()
    signed = Spectrum(s.nu, s.rate, -np.sqrt(s.rate))
    g1, g2 = correlation_function(s), correlation_function(signed)
    np.testing.assert_allclose(g1.g2, g2.g2, rtol=1e-12)


@pytest.fixture(scope="module")
def pipeline(config):
    out = {"initial": initial_spectrum(config)}
    out.update(transformed_spectra(config))
    return out


def test_pipeline_spectra_basic(pipeline, config):
    s = pipeline["initial"]
    assert s.nu[np.argmax(s.rate)] == 0.0
    assert s.nu[0] <= -200e12 and s.nu[-1] >= 200e12
    for sp in pipeline.values():
        assert np.all(sp.rate >= 0)
        np.testing.assert_allclose(sp.amplitude**2, sp.rate, rtol=1e-12)


def test_pipeline_g2_even(pipeline):
    for sp in pipeline.values():
        g = correlation_function(sp)
        np.testing.assert_allclose(g.g2, g.g2[::-1], atol=1e-9)


def test_pipeline_time_bandwidth_products(pipeline):
    for name, sp in pipeline.items():
        assert 0.4 <= time_bandwidth_product(sp) <= 1.0, name


def test_padding_convergence(pipeline):
    for sp in pipeline.values():
        a = correlation_time(correlation_function(sp, 8))
        b = correlation_time(correlation_function(sp, 16))
        assert abs(a - b) < 1e-3 * a


def test_grid_tails_are_negligible(pipeline):
    for sp in pipeline.values():
        tail = np.abs(sp.nu) > 190e12
        assert sp.rate[tail].sum() < 1e-3 * sp.rate.sum()

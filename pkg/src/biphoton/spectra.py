"""Coincidence spectra, integral bandwidth and second-order correlation.

Bandwidth is the equivalent width  Delta_nu = integral R(nu) dnu / R(0).
G2(tau) = |integral F(nu) exp(-2 pi i nu tau) dnu|^2 with a flat spectral
phase, and Delta_tau is its equivalent width.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline

from .collection import coincidence_amplitude, matched_modes
from .grating import angle_for_frequency, pair_efficiency
from .optics import SPEED_OF_LIGHT, DomainError
from .phasematching import detuning_to_omega

__all__ = [
    "CorrelationFunction",
    "Spectrum",
    "bandwidth",
    "central_value",
    "correlation_function",
    "correlation_time",
    "detuning_grid",
    "time_bandwidth_product",
    "initial_spectrum",
    "transformed_spectra",
    "transformed_spectrum",
]


@dataclass(frozen=True)
class Spectrum:
    """Coincidence spectrum on a uniform detuning grid.

    Attributes:
        nu: Detuning from half the pump frequency, Hz.
        rate: R(nu) >= 0, arbitrary units.
        amplitude: Real amplitude F(nu) with R = F^2, or None if only R is known.
        metadata: Free-form description (kind, efficiency mode, masked points ...).
    """

    nu: np.ndarray
    rate: np.ndarray
    amplitude: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        nu = np.asarray(self.nu, dtype=float)
        rate = np.asarray(self.rate, dtype=float)
        if nu.ndim != 1 or nu.shape != rate.shape or nu.size < 2:
            raise ValueError("spectrum needs matching 1-D nu and rate arrays with at least 2 points")
        step = np.diff(nu)
        if np.any(step <= 0) or not np.allclose(step, step[0], rtol=1e-6, atol=0):
            raise ValueError("spectrum grid must be uniform and increasing")
        if not np.all(np.isfinite(rate)) or np.any(rate < 0):
            raise ValueError("spectrum values must be finite and non-negative")
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "rate", rate)
        if self.amplitude is not None:
            object.__setattr__(self, "amplitude", np.asarray(self.amplitude, dtype=float))

    @property
    def step(self) -> float:
        return float(self.nu[1] - self.nu[0])

    def scaled(self, factor) -> "Spectrum":
        """Spectrum with R multiplied by ``factor`` (scalar or per-point, >= 0)."""
        factor = np.asarray(factor, dtype=float)
        amp = None if self.amplitude is None else self.amplitude * np.sqrt(factor)
        return Spectrum(self.nu, self.rate * factor, amp, dict(self.metadata))


@dataclass(frozen=True)
class CorrelationFunction:
    """G2 on a uniform delay grid symmetric about 0, normalized to G2(0) = 1."""

    tau: np.ndarray
    g2: np.ndarray
    metadata: dict = field(default_factory=dict)


def detuning_grid(span: float = 250e12, points: int = 1001) -> np.ndarray:
    return np.linspace(-span, span, int(points))


def central_value(s: Spectrum) -> float:
    """R(0), by cubic interpolation when 0 is not a grid point."""
    idx = np.flatnonzero(np.isclose(s.nu, 0.0, rtol=0, atol=1e-9 * s.step))
    if idx.size:
        return float(s.rate[idx[0]])
    if not s.nu[0] < 0 < s.nu[-1]:
        raise DomainError("spectrum grid does not contain nu = 0")
    return float(CubicSpline(s.nu, s.rate)(0.0))


def bandwidth(s: Spectrum) -> float:
    """Delta_nu = trapezoid integral of R over the grid / R(0), in Hz."""
    r0 = central_value(s)
    if not r0 > 0:
        raise DomainError("bandwidth undefined: R(0) is zero")
    return float(trapezoid(s.rate, s.nu) / r0)


def correlation_function(s: Spectrum, padding: int = 8) -> CorrelationFunction:
    """G2 from the Fourier-limited amplitude by a zero-padded FFT.

    Uses ``s.amplitude`` when present (it keeps the sign changes of the
    overlap amplitude), otherwise sqrt(R). The padded length is odd so the
    delay grid is exactly symmetric about 0.
    """
    if padding < 1:
        raise ValueError("padding must be >= 1")
    amp = s.amplitude if s.amplitude is not None else np.sqrt(s.rate)
    n = amp.size
    size = padding * n
    size += 1 - size % 2
    spec = np.fft.fftshift(np.fft.fft(amp, size))
    g = np.abs(spec) ** 2
    mid = size // 2
    tau = (np.arange(size) - mid) / (size * s.step)
    if not g[mid] > 0:
        raise DomainError("G2(0) vanishes: spectrum amplitude integrates to zero")
    meta = {"padding": padding, "size": size, "source": s.metadata.get("kind", "")}
    return CorrelationFunction(tau=tau, g2=g / g[mid], metadata=meta)


def correlation_time(g: CorrelationFunction) -> float:
    """Delta_tau = integral G2 dtau / G2(0).

    The DFT output is periodic, so the plain sum is the trapezoid rule.
    """
    mid = g.tau.size // 2
    return float(g.g2.sum() * (g.tau[1] - g.tau[0]) / g.g2[mid])


def _valid_points(config, nu):
    nu0 = config.pump.degenerate_frequency
    lo, hi = config.crystal.window
    fs, fi = nu0 + nu, nu0 - nu
    ok = (fs > 0) & (fi > 0)
    lam_s = np.where(ok, SPEED_OF_LIGHT / np.where(ok, fs, 1.0), np.nan)
    lam_i = np.where(ok, SPEED_OF_LIGHT / np.where(ok, fi, 1.0), np.nan)
    return ok & (lam_s >= lo) & (lam_s <= hi) & (lam_i >= lo) & (lam_i <= hi)


def _amplitude(config, nu, theta_cs, theta_ci, mask):
    amp = np.zeros(nu.shape)
    if np.any(mask):
        omega = detuning_to_omega(nu[mask], config.pump)
        sel = lambda x: x[mask] if np.ndim(x) else x  # noqa: E731
        modes = matched_modes(
            omega, config.pump, config.fiber, config.detection_bandwidth, sel(theta_cs), sel(theta_ci)
        )
        amp[mask] = coincidence_amplitude(
            omega, modes, config.crystal, config.pump,
            rtol=config.quadrature.rtol, min_panels=config.quadrature.min_panels,
        )
    return amp


def _grid(config, nu):
    return detuning_grid(config.grids.spectrum_span, config.grids.spectrum_points) if nu is None else np.asarray(nu, float)


def initial_spectrum(config, nu=None) -> Spectrum:
    """Collinear collection (theta_cs = theta_ci = 0) with a unit-reflectance mirror."""
    nu = _grid(config, nu)
    mask = _valid_points(config, nu)
    amp = _amplitude(config, nu, 0.0, 0.0, mask)
    meta = {"kind": "initial", "efficiency_mode": "mirror", "masked_points": int((~mask).sum())}
    return Spectrum(nu, amp**2, amp, meta)


def transformed_spectra(config, modes=("ideal", "anchored"), nu=None) -> dict:
    """Grating-mapped spectra for several efficiency modes sharing one overlap evaluation."""
    nu = _grid(config, nu)
    mask = _valid_points(config, nu)
    omega = detuning_to_omega(nu, config.pump)
    omega_p = config.pump.angular_frequency
    with np.errstate(invalid="ignore"):
        th_s = np.where(mask, angle_for_frequency(np.where(mask, omega, omega_p / 2), config.grating, strict=False), np.nan)
        th_i = np.where(
            mask, angle_for_frequency(np.where(mask, omega_p - omega, omega_p / 2), config.grating, strict=False), np.nan
        )
    propagating = mask & np.isfinite(th_s) & np.isfinite(th_i)
    amp = _amplitude(config, nu, th_s, th_i, propagating)
    out = {}
    for mode in modes:
        grating = config.grating.with_mode(mode)
        eta = np.zeros(nu.shape)
        eta[propagating] = pair_efficiency(omega[propagating], grating, omega_p)
        a = amp * np.sqrt(eta)
        meta = {
            "kind": f"transformed_{mode}",
            "efficiency_mode": mode,
            "gamma": config.grating.gamma,
            "masked_points": int((~mask).sum()),
            "evanescent_points": int((mask & ~propagating).sum()),
        }
        out[mode] = Spectrum(nu, a**2, a, meta)
    return out


def transformed_spectrum(config, efficiency_mode: str = "ideal", nu=None) -> Spectrum:
    """Collection angles from the grating map for both photons; pair efficiency in anchored mode."""
    return transformed_spectra(config, (efficiency_mode,), nu)[efficiency_mode]


def time_bandwidth_product(s: Spectrum, padding: int = 8) -> float:
    return bandwidth(s) * correlation_time(correlation_function(s, padding))


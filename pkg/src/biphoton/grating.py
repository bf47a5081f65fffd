"""Diffraction-grating angular dispersion and first-order efficiency.

The grating relation used here is

    sin(theta_0) - sin(gamma * theta_c) = 2 pi c D / omega = lambda D

where theta_c is the external crystal-side angle conjugate to the fiber mode,
theta_0 the incidence angle of that mode, D the groove density and gamma the
angular magnification of the relay between crystal and grating.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .optics import SPEED_OF_LIGHT, DomainError

__all__ = [
    "EvanescentOrderError",
    "GratingSpec",
    "angle_for_frequency",
    "angle_for_wavelength",
    "efficiency",
    "frequency_for_angle",
    "pair_efficiency",
    "solve_theta0",
]

DEFAULT_ANCHORS = ((500e-9, 0.25), (750e-9, 0.70))


class EvanescentOrderError(DomainError):
    """The first diffraction order does not propagate for this wavelength."""


@dataclass(frozen=True)
class GratingSpec:
    """Reflective grating used in first order.

    Attributes:
        groove_density: Lines per meter.
        theta0: Incidence angle of the fiber-conjugate mode, radians.
        gamma: Angular magnification between crystal and grating.
        efficiency_anchors: ((wavelength_m, efficiency), ...) sorted by wavelength.
        efficiency_mode: "ideal" (unit efficiency) or "anchored".
    """

    groove_density: float = 600e3
    theta0: float = 0.0
    gamma: float = 1.05
    efficiency_anchors: tuple = DEFAULT_ANCHORS
    efficiency_mode: str = "ideal"

    def __post_init__(self):
        if not self.groove_density > 0:
            raise ValueError(f"grating.groove_density must be positive, got {self.groove_density}")
        if not self.gamma > 0:
            raise ValueError(f"grating.gamma must be positive, got {self.gamma}")
        if self.efficiency_mode not in ("ideal", "anchored"):
            raise ValueError(f"grating.efficiency_mode must be 'ideal' or 'anchored', got {self.efficiency_mode!r}")
        anchors = tuple((float(w), float(e)) for w, e in self.efficiency_anchors)
        object.__setattr__(self, "efficiency_anchors", anchors)
        waves = [w for w, _ in anchors]
        if any(b <= a for a, b in zip(waves, waves[1:])):
            raise ValueError("grating.efficiency_anchors must be strictly increasing in wavelength")
        if any(not 0.0 <= e <= 1.0 for _, e in anchors):
            raise ValueError("grating.efficiency_anchors efficiencies must lie in [0, 1]")
        if self.efficiency_mode == "anchored" and len(anchors) < 2:
            raise ValueError("grating.efficiency_anchors needs at least 2 points in anchored mode")

    def with_mode(self, mode: str) -> "GratingSpec":
        return replace(self, efficiency_mode=mode)

    def with_gamma(self, gamma: float) -> "GratingSpec":
        return replace(self, gamma=float(gamma))


def solve_theta0(groove_density: float, central_wavelength: float) -> float:
    """Incidence angle that puts ``central_wavelength`` on axis (theta_c = 0)."""
    s = central_wavelength * groove_density
    if not 0.0 <= s <= 1.0:
        raise EvanescentOrderError(
            f"lambda*D = {s:.4g} outside [0, 1]: no propagating first order at the central wavelength"
        )
    return math.asin(s)


def angle_for_wavelength(wavelength, grating: GratingSpec, strict: bool = True):
    """theta_c for vacuum wavelength(s); NaN for evanescent orders when ``strict`` is False."""
    lam = np.asarray(wavelength, dtype=float)
    arg = math.sin(grating.theta0) - lam * grating.groove_density
    bad = np.abs(arg) > 1
    if strict and np.any(bad):
        raise EvanescentOrderError("sin(theta_0) - lambda*D outside [-1, 1]: evanescent diffraction order")
    theta = np.arcsin(np.where(bad, np.nan, arg)) / grating.gamma
    return float(theta) if theta.ndim == 0 else theta


def angle_for_frequency(omega, grating: GratingSpec, strict: bool = True):
    """theta_c = arcsin(sin(theta_0) - 2 pi c D / omega) / gamma."""
    lam = 2 * np.pi * SPEED_OF_LIGHT / np.asarray(omega, dtype=float)
    return angle_for_wavelength(lam, grating, strict)


def frequency_for_angle(theta, grating: GratingSpec):
    """Inverse of :func:`angle_for_frequency`."""
    denom = math.sin(grating.theta0) - np.sin(grating.gamma * np.asarray(theta, dtype=float))
    if np.any(denom <= 0):
        raise DomainError("angle maps to a non-positive wavelength")
    omega = 2 * np.pi * SPEED_OF_LIGHT * grating.groove_density / denom
    return float(omega) if np.ndim(omega) == 0 else omega


def efficiency(wavelength, grating: GratingSpec):
    """First-order efficiency: 1 in ideal mode, else linear through the anchors, clamped."""
    lam = np.asarray(wavelength, dtype=float)
    if grating.efficiency_mode == "ideal":
        eta = np.ones(lam.shape)
    else:
        w, e = zip(*grating.efficiency_anchors)
        eta = np.clip(np.interp(lam, w, e), 0.0, 1.0)
    return float(eta) if eta.ndim == 0 else eta


def pair_efficiency(omega_s, grating: GratingSpec, omega_p: float):
    """Product of the signal and idler efficiencies, idler at omega_p - omega_s."""
    omega_s = np.asarray(omega_s, dtype=float)
    lam_s = 2 * np.pi * SPEED_OF_LIGHT / omega_s
    lam_i = 2 * np.pi * SPEED_OF_LIGHT / (omega_p - omega_s)
    out = np.asarray(efficiency(lam_s, grating)) * np.asarray(efficiency(lam_i, grating))
    return float(out) if out.ndim == 0 else out

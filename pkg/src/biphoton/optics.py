"""Uniaxial crystal optics: Sellmeier indices, index ellipsoid, cut angle, refraction.

Wavelengths are vacuum wavelengths in meters throughout; the Sellmeier
polynomial itself is evaluated in micrometers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

__all__ = [
    "SPEED_OF_LIGHT",
    "BBO_EIMERL",
    "CrystalSpec",
    "DomainError",
    "PhaseMatchingError",
    "Wavelength",
    "angular_frequency",
    "bbo_crystal",
    "external_angle",
    "internal_angle",
    "refractive_index_extraordinary",
    "refractive_index_ordinary",
    "solve_cut_angle",
    "wavelength_from_angular_frequency",
]


class DomainError(ValueError):
    """Input outside the domain where a formula is defined."""


class PhaseMatchingError(DomainError):
    """No phase-matched solution exists for the requested geometry."""


# Eimerl et al. (1987) beta-barium borate, n^2 = A + B/(lam^2 - C) - D*lam^2, lam in um.
BBO_EIMERL = {
    "ordinary": (2.7405, 0.0184, 0.0179, 0.0155),
    "extraordinary": (2.3730, 0.0128, 0.0156, 0.0044),
}

DEFAULT_WINDOW = (0.20e-6, 1.10e-6)


@dataclass(frozen=True)
class CrystalSpec:
    """Negative uniaxial crystal.

    Attributes:
        length: Crystal length in meters.
        sellmeier_o: (A, B, C, D) for the ordinary index.
        sellmeier_e: (A, B, C, D) for the principal extraordinary index.
        cut_angle: Angle between pump propagation and optic axis, radians.
        walkoff_displacement: Lateral pump drift accumulated over the full length, meters.
        window: (min, max) vacuum wavelength in meters where the Sellmeier set is trusted.
        name: Free-form label carried into output metadata.
    """

    length: float
    sellmeier_o: tuple[float, float, float, float]
    sellmeier_e: tuple[float, float, float, float]
    cut_angle: float = 0.0
    walkoff_displacement: float = 0.0
    window: tuple[float, float] = DEFAULT_WINDOW
    name: str = "custom"
    walkoff_axis: str = "x"

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"crystal.length must be positive, got {self.length}")
        if not 0.0 <= self.cut_angle <= math.pi / 2:
            raise ValueError(f"crystal.cut_angle must lie in [0, pi/2], got {self.cut_angle}")
        if len(self.sellmeier_o) != 4 or len(self.sellmeier_e) != 4:
            raise ValueError("Sellmeier coefficient sets need four entries (A, B, C, D)")
        lo, hi = self.window
        if not 0 < lo < hi:
            raise ValueError(f"crystal.window must satisfy 0 < min < max, got {self.window}")
        if self.walkoff_axis not in ("x", "y"):
            raise ValueError(f"crystal.walkoff_axis must be 'x' or 'y', got {self.walkoff_axis!r}")
        lam = np.linspace(lo, hi, 65)
        no2 = _sellmeier(self.sellmeier_o, lam)
        ne2 = _sellmeier(self.sellmeier_e, lam)
        if np.any(ne2 <= 1) or np.any(no2 <= ne2):
            raise ValueError("crystal must be negative uniaxial (n_o > n_e > 1) across its window")

    def with_cut_angle(self, theta: float) -> "CrystalSpec":
        return replace(self, cut_angle=float(theta))


def bbo_crystal(length: float = 2e-3, walkoff_displacement: float = 50e-6) -> CrystalSpec:
    """BBO with the Eimerl coefficient set and no cut angle yet (see :func:`solve_cut_angle`)."""
    return CrystalSpec(
        length=length,
        sellmeier_o=BBO_EIMERL["ordinary"],
        sellmeier_e=BBO_EIMERL["extraordinary"],
        walkoff_displacement=walkoff_displacement,
        name="BBO (Eimerl 1987)",
    )


@dataclass(frozen=True)
class Wavelength:
    """Vacuum wavelength in meters with frequency conversions."""

    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"wavelength must be positive, got {self.value}")

    @property
    def angular_frequency(self) -> float:
        return 2 * math.pi * SPEED_OF_LIGHT / self.value

    @classmethod
    def from_angular_frequency(cls, omega: float) -> "Wavelength":
        return cls(2 * math.pi * SPEED_OF_LIGHT / omega)

    def detuning(self, pump_wavelength: float) -> float:
        """Frequency offset in Hz from the degenerate point, half the pump frequency."""
        return SPEED_OF_LIGHT / self.value - SPEED_OF_LIGHT / (2 * pump_wavelength)

    @classmethod
    def from_detuning(cls, nu: float, pump_wavelength: float) -> "Wavelength":
        return cls(SPEED_OF_LIGHT / (SPEED_OF_LIGHT / (2 * pump_wavelength) + nu))


def angular_frequency(wavelength):
    return 2 * np.pi * SPEED_OF_LIGHT / np.asarray(wavelength, dtype=float)


def wavelength_from_angular_frequency(omega):
    return 2 * np.pi * SPEED_OF_LIGHT / np.asarray(omega, dtype=float)


def _check_window(crystal: CrystalSpec, wavelength) -> np.ndarray:
    lam = np.asarray(wavelength, dtype=float)
    lo, hi = crystal.window
    bad = ~((lam >= lo) & (lam <= hi))
    if np.any(bad):
        worst = lam[bad].flat[0] if lam.ndim else float(lam)
        raise DomainError(
            f"wavelength {worst * 1e9:.3f} nm outside Sellmeier window "
            f"[{lo * 1e9:.1f}, {hi * 1e9:.1f}] nm of {crystal.name}"
        )
    return lam


def _sellmeier(coeffs, lam_m: np.ndarray) -> np.ndarray:
    a, b, cc, d = coeffs
    l2 = (lam_m * 1e6) ** 2
    return a + b / (l2 - cc) - d * l2


def _scalar_or_array(x: np.ndarray):
    return float(x) if np.ndim(x) == 0 else x


def refractive_index_ordinary(crystal: CrystalSpec, wavelength):
    """Ordinary index n_o at vacuum wavelength(s) in meters."""
    lam = _check_window(crystal, wavelength)
    return _scalar_or_array(np.sqrt(_sellmeier(crystal.sellmeier_o, lam)))


def _principal_extraordinary(crystal: CrystalSpec, wavelength):
    lam = _check_window(crystal, wavelength)
    return np.sqrt(_sellmeier(crystal.sellmeier_e, lam))


def refractive_index_extraordinary(crystal: CrystalSpec, wavelength, theta):
    """Extraordinary index for propagation at ``theta`` from the optic axis.

    1/n(theta)^2 = cos^2(theta)/n_o^2 + sin^2(theta)/n_e^2
    """
    theta = np.asarray(theta, dtype=float)
    if np.any((theta < 0) | (theta > math.pi / 2 + 1e-15)):
        raise DomainError("extraordinary-index angle must lie in [0, pi/2]")
    no = np.asarray(refractive_index_ordinary(crystal, wavelength))
    ne = _principal_extraordinary(crystal, wavelength)
    inv = np.cos(theta) ** 2 / no**2 + np.sin(theta) ** 2 / ne**2
    return _scalar_or_array(1.0 / np.sqrt(inv))


def solve_cut_angle(crystal: CrystalSpec, pump_wavelength: float, tol: float = 1e-10) -> float:
    """Cut angle for collinear degenerate type-I (e -> o + o) phase matching.

    Bisection on n_e(theta, lam_p) - n_o(2 lam_p) over [0, pi/2]; the
    mismatch is monotone decreasing in theta.
    """
    target = refractive_index_ordinary(crystal, 2 * pump_wavelength)

    def mismatch(t):
        return refractive_index_extraordinary(crystal, pump_wavelength, t) - target

    lo, hi = 0.0, math.pi / 2
    f_lo, f_hi = mismatch(lo), mismatch(hi)
    if abs(f_hi) <= tol:
        return hi
    if abs(f_lo) <= tol:
        return lo
    if f_lo < 0 or f_hi > 0:
        raise PhaseMatchingError(
            f"collinear degenerate phase matching infeasible: n_o(2*lam_p)={target:.6f} "
            f"outside [{f_hi + target:.6f}, {f_lo + target:.6f}]"
        )
    # Both the index residual and the bracket width must drop below tol.
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = mismatch(mid)
        if (abs(f_mid) < tol and hi - lo < tol) or hi - lo < 1e-16:
            return mid
        if f_mid > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def external_angle(crystal: CrystalSpec, wavelength, theta_internal):
    """Lab angle of an ordinary ray leaving the exit face (Snell refraction)."""
    n = np.asarray(refractive_index_ordinary(crystal, wavelength))
    s = n * np.sin(np.asarray(theta_internal, dtype=float))
    if np.any(np.abs(s) > 1):
        raise DomainError("total internal reflection at the crystal exit face")
    return _scalar_or_array(np.arcsin(s))


def internal_angle(crystal: CrystalSpec, wavelength, theta_external):
    """Inverse of :func:`external_angle`."""
    n = np.asarray(refractive_index_ordinary(crystal, wavelength))
    return _scalar_or_array(np.arcsin(np.sin(np.asarray(theta_external, dtype=float)) / n))

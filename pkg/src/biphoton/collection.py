"""Fiber-coupled coincidence rate from a three-Gaussian mode overlap.

Model: collimated Gaussian pump, signal and idler modes inside the crystal.
The signal and idler axes are tilted by their internal central angles in the
x-z plane; the pump runs along z and drifts laterally by
``walkoff_displacement * z / L``. The transverse (x, y) overlap including the
plane-wave phase mismatch is done in closed form, which leaves

    F = sqrt(delta_omega) * N * C * integral_{-L/2}^{L/2} exp(-p z^2 + i q z) dz

with N the product of mode normalizations. The remaining z-integral goes to
the compiled kernel in :mod:`biphoton._kernels`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .optics import SPEED_OF_LIGHT, CrystalSpec, internal_angle, refractive_index_ordinary
from .phasematching import PumpSpec, pump_wave_number

__all__ = [
    "CollectionModes",
    "FiberTrainSpec",
    "NumericalError",
    "ParaxialWarning",
    "coincidence_amplitude",
    "coincidence_rate",
    "collection_waist",
    "fiber_mode_waist",
    "matched_modes",
    "overlap_coefficients",
    "select_gamma_train",
]


class NumericalError(RuntimeError):
    """The z-quadrature did not reach its tolerance."""


class ParaxialWarning(UserWarning):
    """A mode's Rayleigh length is shorter than the crystal."""


@dataclass(frozen=True)
class FiberTrainSpec:
    """Single-mode fiber and the relay that images it into the crystal.

    Attributes:
        numerical_aperture: Fiber N.A.
        magnification: Transverse magnification Gamma between fiber mode and crystal plane.
        reference_wavelength: Wavelength (m) at which Gamma is chosen.
    """

    numerical_aperture: float = 0.12
    magnification: float = 1.0
    reference_wavelength: float = 650e-9

    def __post_init__(self):
        if not 0.0 < self.numerical_aperture < 1.0:
            raise ValueError(f"fiber.numerical_aperture must lie in (0, 1), got {self.numerical_aperture}")
        if not self.magnification > 0:
            raise ValueError(f"fiber.magnification must be positive, got {self.magnification}")
        if not self.reference_wavelength > 0:
            raise ValueError(f"fiber.reference_wavelength must be positive, got {self.reference_wavelength}")


def fiber_mode_waist(wavelength, fiber: FiberTrainSpec):
    """W_f = lambda / (pi N.A.)."""
    w = np.asarray(wavelength, dtype=float) / (math.pi * fiber.numerical_aperture)
    return float(w) if w.ndim == 0 else w


def collection_waist(wavelength, fiber: FiberTrainSpec):
    """Waist of the fiber mode imaged into the crystal, Gamma * W_f(lambda)."""
    return fiber.magnification * fiber_mode_waist(wavelength, fiber)


def select_gamma_train(target_waist: float, reference_wavelength: float, fiber: FiberTrainSpec) -> float:
    """Gamma such that the collection waist equals ``target_waist`` at the reference wavelength."""
    if not target_waist > 0:
        raise ValueError(f"target waist must be positive, got {target_waist}")
    return float(target_waist / fiber_mode_waist(reference_wavelength, fiber))


@dataclass(frozen=True)
class CollectionModes:
    """Signal and idler collection modes. Fields may be arrays that broadcast with omega_s.

    Attributes:
        theta_cs, theta_ci: Signed external central angles (radians) in a common frame.
        waist_s, waist_i: Collection waists at the crystal (m).
        waist_p: Pump waist (m).
        bandwidth: Detection bandwidth delta_omega (rad/s).
    """

    theta_cs: object
    theta_ci: object
    waist_s: object
    waist_i: object
    waist_p: float
    bandwidth: float

    def __post_init__(self):
        for name in ("waist_s", "waist_i", "waist_p", "bandwidth"):
            if not np.all(np.asarray(getattr(self, name)) > 0):
                raise ValueError(f"collection.{name} must be positive")


def matched_modes(omega_s, pump: PumpSpec, fiber: FiberTrainSpec, bandwidth: float,
                  theta_cs=0.0, theta_ci=0.0) -> CollectionModes:
    """Modes whose waists follow W = Gamma * W_f(lambda) at each photon's wavelength."""
    omega_s = np.asarray(omega_s, dtype=float)
    lam_s = 2 * np.pi * SPEED_OF_LIGHT / omega_s
    lam_i = 2 * np.pi * SPEED_OF_LIGHT / (pump.angular_frequency - omega_s)
    return CollectionModes(
        theta_cs=theta_cs,
        theta_ci=theta_ci,
        waist_s=collection_waist(lam_s, fiber),
        waist_i=collection_waist(lam_i, fiber),
        waist_p=pump.waist,
        bandwidth=bandwidth,
    )


def _check_paraxial(crystal, pairs):
    for label, w, lam in pairs:
        zr = np.pi * np.asarray(w) ** 2 / np.asarray(lam)
        if np.any(zr < crystal.length):
            warnings.warn(
                f"{label} Rayleigh length {float(np.min(zr)) * 1e3:.3g} mm is shorter than the "
                f"{crystal.length * 1e3:.3g} mm crystal; the collimated-mode model is outside its range",
                ParaxialWarning,
                stacklevel=3,
            )
            return


def overlap_coefficients(omega_s, modes: CollectionModes, crystal: CrystalSpec, pump: PumpSpec):
    """Closed-form transverse overlap: returns (N*C, p, q) with A(z) e^{i Dz z} = N*C exp(-p z^2 + i q z)."""
    omega_s = np.asarray(omega_s, dtype=float)
    omega_i = pump.angular_frequency - omega_s
    lam_s = 2 * np.pi * SPEED_OF_LIGHT / omega_s
    lam_i = 2 * np.pi * SPEED_OF_LIGHT / omega_i
    ns = refractive_index_ordinary(crystal, lam_s)
    ni = refractive_index_ordinary(crystal, lam_i)
    ks, ki = ns * omega_s / SPEED_OF_LIGHT, ni * omega_i / SPEED_OF_LIGHT
    ts = internal_angle(crystal, lam_s, modes.theta_cs)
    ti = internal_angle(crystal, lam_i, modes.theta_ci)
    wp = modes.waist_p
    ws, wi = np.asarray(modes.waist_s, dtype=float), np.asarray(modes.waist_i, dtype=float)
    _check_paraxial(crystal, (("pump", wp, pump.wavelength), ("signal", ws, lam_s), ("idler", wi, lam_i)))

    drift = crystal.walkoff_displacement / crystal.length
    xi, eta = (drift, 0.0) if crystal.walkoff_axis == "x" else (0.0, drift)
    ip, is_, ii = 1 / wp**2, 1 / ws**2, 1 / wi**2

    a = ip + np.cos(ts) ** 2 * is_ + np.cos(ti) ** 2 * ii
    ay = ip + is_ + ii
    beta = 2 * xi * ip + np.sin(2 * ts) * is_ + np.sin(2 * ti) * ii
    kappa = xi**2 * ip + np.sin(ts) ** 2 * is_ + np.sin(ti) ** 2 * ii
    p = kappa - beta**2 / (4 * a) + eta**2 * (ip - ip**2 / ay)
    dz = pump_wave_number(crystal, pump) - ks * np.cos(ts) - ki * np.cos(ti)
    dx = -(ks * np.sin(ts) + ki * np.sin(ti))
    q = dz + beta * dx / (2 * a)
    c = np.pi / np.sqrt(a * ay) * np.exp(-(dx**2) / (4 * a))
    norm = (2 / np.pi) ** 1.5 / (wp * ws * wi)
    # p is a Schur complement of a positive form; clip rounding below zero
    return norm * c, np.maximum(p, 0.0), q


def coincidence_amplitude(omega_s, modes: CollectionModes, crystal: CrystalSpec, pump: PumpSpec,
                          rtol: float = 1e-8, min_panels: int = 64):
    """Real overlap amplitude F for a crystal centered at z = 0 (flat spectral phase).

    Raises:
        NumericalError: if any z-quadrature fails to converge.
    """
    pref, p, q = overlap_coefficients(omega_s, modes, crystal, pump)
    pref, p, q = np.broadcast_arrays(pref, p, q)
    vals, evals, failed = _kernels.gauss_osc_integrals(
        p.ravel(), q.ravel(), 0.5 * crystal.length, rtol=rtol, min_panels=min_panels
    )
    if np.any(failed):
        k = int(np.flatnonzero(failed)[0])
        raise NumericalError(
            f"z-quadrature did not converge for {int(failed.sum())} point(s); first at p={p.ravel()[k]:.4g} /m^2, "
            f"q={q.ravel()[k]:.4g} /m after {int(evals[k])} evaluations (rtol={rtol:g})"
        )
    # odd part of the integrand cancels on the symmetric interval
    amp = math.sqrt(modes.bandwidth) * pref * vals.real.reshape(p.shape)
    return float(amp) if amp.ndim == 0 else amp


def coincidence_rate(omega_s, modes: CollectionModes, crystal: CrystalSpec, pump: PumpSpec,
                     rtol: float = 1e-8, min_panels: int = 64):
    """R_T = |F|^2 in arbitrary units."""
    amp = coincidence_amplitude(omega_s, modes, crystal, pump, rtol=rtol, min_panels=min_panels)
    return amp * amp

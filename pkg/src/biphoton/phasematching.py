"""Type-I SPDC phase matching for a monochromatic plane-wave pump.

Signal and idler are ordinary waves, the pump is extraordinary at the crystal
cut angle. Frequencies are angular (rad/s) unless a name says ``nu`` (Hz
detuning from half the pump frequency). Angles passed in as ``*_internal`` are
inside the crystal; everything else is an external lab angle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .optics import (
    SPEED_OF_LIGHT,
    CrystalSpec,
    DomainError,
    PhaseMatchingError,
    _sellmeier,
    internal_angle,
    refractive_index_extraordinary,
    refractive_index_ordinary,
)

__all__ = [
    "PumpSpec",
    "SpectralAngularGrid",
    "branch_detuning_span",
    "conjugate_angle",
    "detuning_to_omega",
    "intensity_at",
    "intensity_grid",
    "longitudinal_mismatch",
    "phase_matching_branch",
    "pump_wave_number",
    "wave_number_ordinary",
]


@dataclass(frozen=True)
class PumpSpec:
    """Pump beam.

    Attributes:
        wavelength: Vacuum wavelength in meters.
        waist: Gaussian waist radius in meters.
    """

    wavelength: float = 325e-9
    waist: float = 34e-6

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError(f"pump.wavelength must be positive, got {self.wavelength}")
        if not self.waist > 0:
            raise ValueError(f"pump.waist must be positive, got {self.waist}")

    @property
    def angular_frequency(self) -> float:
        return 2 * math.pi * SPEED_OF_LIGHT / self.wavelength

    @property
    def degenerate_frequency(self) -> float:
        """nu_0 = omega_p / 4 pi, in Hz."""
        return SPEED_OF_LIGHT / (2 * self.wavelength)


def detuning_to_omega(nu, pump: PumpSpec):
    """Signal angular frequency for detuning ``nu`` (Hz)."""
    return 2 * np.pi * (pump.degenerate_frequency + np.asarray(nu, dtype=float))


def wave_number_ordinary(crystal: CrystalSpec, omega):
    omega = np.asarray(omega, dtype=float)
    n = refractive_index_ordinary(crystal, 2 * np.pi * SPEED_OF_LIGHT / omega)
    return n * omega / SPEED_OF_LIGHT


def pump_wave_number(crystal: CrystalSpec, pump: PumpSpec) -> float:
    n = refractive_index_extraordinary(crystal, pump.wavelength, crystal.cut_angle)
    return n * pump.angular_frequency / SPEED_OF_LIGHT


def _idler_geometry(omega_s, theta_s, crystal, pump):
    """Wave numbers and signed idler angle; ``ok`` is False where no idler exists."""
    omega_s = np.asarray(omega_s, dtype=float)
    theta_s = np.asarray(theta_s, dtype=float)
    omega_i = pump.angular_frequency - omega_s
    if np.any((omega_s <= 0) | (omega_i <= 0)):
        raise DomainError("signal frequency must lie strictly between 0 and the pump frequency")
    ks = wave_number_ordinary(crystal, omega_s)
    ki = wave_number_ordinary(crystal, omega_i)
    s = ks * np.sin(theta_s) / ki
    ok = np.abs(s) <= 1
    theta_i = -np.arcsin(np.clip(s, -1, 1))
    return ks, ki, theta_i, ok


def conjugate_angle(omega_s, theta_s_internal, crystal: CrystalSpec, pump: PumpSpec):
    """Internal idler angle matching the signal's transverse momentum.

    Solves k_i sin(theta_i) = k_s sin(theta_s) with omega_i = omega_p - omega_s.
    The idler leaves on the opposite side of the pump axis; the returned value
    is the magnitude of that angle.

    Raises:
        PhaseMatchingError: if k_s |sin theta_s| exceeds k_i.
    """
    _, _, theta_i, ok = _idler_geometry(omega_s, theta_s_internal, crystal, pump)
    if not np.all(ok):
        raise PhaseMatchingError("signal transverse momentum exceeds the idler wave number")
    out = np.abs(theta_i)
    return float(out) if out.ndim == 0 else out


def longitudinal_mismatch(omega_s, theta_s_internal, crystal: CrystalSpec, pump: PumpSpec):
    """Delta_z = k_p - k_s cos(theta_s) - k_i cos(theta_i), in rad/m."""
    ks, ki, theta_i, ok = _idler_geometry(omega_s, theta_s_internal, crystal, pump)
    if not np.all(ok):
        raise PhaseMatchingError("signal transverse momentum exceeds the idler wave number")
    dz = pump_wave_number(crystal, pump) - ks * np.cos(theta_s_internal) - ki * np.cos(theta_i)
    return float(dz) if np.ndim(dz) == 0 else dz


def _in_window(crystal: CrystalSpec, wavelength):
    lo, hi = crystal.window
    return (wavelength >= lo) & (wavelength <= hi)


def intensity_at(nu, theta_external, crystal: CrystalSpec, pump: PumpSpec):
    """sinc^2(Delta_z L / 2) at detuning ``nu`` and external signal angle.

    Broadcasts its inputs. Points with no idler solution or with either photon
    outside the Sellmeier window are 0.
    """
    nu, theta = np.broadcast_arrays(np.asarray(nu, dtype=float), np.asarray(theta_external, dtype=float))
    shape = nu.shape
    nu, theta = nu.ravel(), theta.ravel()
    out = np.zeros(nu.shape)
    nu0 = pump.degenerate_frequency
    fs, fi = nu0 + nu, nu0 - nu
    valid = (fs > 0) & (fi > 0)
    valid[valid] &= _in_window(crystal, SPEED_OF_LIGHT / fs[valid]) & _in_window(
        crystal, SPEED_OF_LIGHT / fi[valid]
    )
    if np.any(valid):
        lam_s = SPEED_OF_LIGHT / fs[valid]
        th_int = internal_angle(crystal, lam_s, theta[valid])
        ks, ki, th_i, ok = _idler_geometry(2 * np.pi * fs[valid], th_int, crystal, pump)
        dz = pump_wave_number(crystal, pump) - ks * np.cos(th_int) - ki * np.cos(th_i)
        x = 0.5 * dz * crystal.length
        vals = np.where(ok, np.sinc(x / np.pi) ** 2, 0.0)
        out[valid] = vals
    return float(out[0]) if shape == () else out.reshape(shape)


@dataclass(frozen=True)
class SpectralAngularGrid:
    """Frequency-angular intensity map.

    Attributes:
        nu: Detuning axis in Hz, strictly increasing.
        theta: External angle axis in radians, strictly increasing.
        intensity: Array of shape (len(theta), len(nu)), normalized to max 1.
        raw_max: Maximum before normalization.
        masked: Number of points with no solution or outside the Sellmeier window.
    """

    nu: np.ndarray
    theta: np.ndarray
    intensity: np.ndarray
    raw_max: float
    masked: int
    metadata: dict = field(default_factory=dict)


def intensity_grid(
    crystal: CrystalSpec,
    pump: PumpSpec,
    nu_range=(-200e12, 500e12),
    theta_range=(-math.radians(10), math.radians(10)),
    resolution=(1000, 600),
    theta_shift=None,
) -> SpectralAngularGrid:
    """Sample :func:`intensity_at` on a regular (nu, theta) grid.

    Args:
        theta_shift: Optional callable nu -> angle. The grid row ``theta`` then
            holds the intensity at ``theta + theta_shift(nu)``, i.e. the map as
            seen in a frame that follows the shift (used for the grating-mapped
            view, where the fiber mode sits at theta = 0).
    """
    n_nu, n_theta = (int(r) for r in resolution)
    if n_nu < 2 or n_theta < 2:
        raise ValueError("grid resolution needs at least 2 points per axis")
    if not (nu_range[1] > nu_range[0] and theta_range[1] > theta_range[0]):
        raise ValueError("grid ranges must be non-empty and increasing")
    nu = np.linspace(nu_range[0], nu_range[1], n_nu)
    theta = np.linspace(theta_range[0], theta_range[1], n_theta)
    shift = np.zeros(n_nu) if theta_shift is None else np.asarray(theta_shift(nu), dtype=float)
    th = theta[:, None] + shift[None, :]
    finite = np.isfinite(th)
    raw = np.zeros(th.shape)
    nu2 = np.broadcast_to(nu[None, :], th.shape)
    raw[finite] = intensity_at(nu2[finite], th[finite], crystal, pump)
    peak = float(raw.max())
    norm = raw / peak if peak > 0 else raw
    masked = int(np.count_nonzero(~finite)) + int(np.count_nonzero(raw[finite] == 0))
    return SpectralAngularGrid(nu=nu, theta=theta, intensity=norm, raw_max=peak, masked=masked)


def _mismatch_scalar(nu, theta_ext, crystal, pump, idler_index):
    """Delta_z for the branch search; ``idler_index`` overrides n_o outside the window."""
    nu0 = pump.degenerate_frequency
    fs, fi = nu0 + nu, nu0 - nu
    lam_s, lam_i = SPEED_OF_LIGHT / fs, SPEED_OF_LIGHT / fi

    def n_o(lam):
        lo, hi = crystal.window
        if lo <= lam <= hi:
            return math.sqrt(float(_sellmeier(crystal.sellmeier_o, np.float64(lam))))
        if idler_index is None:
            raise DomainError(f"wavelength {lam * 1e9:.1f} nm outside Sellmeier window")
        if idler_index == "edge":
            edge = lo if lam < lo else hi
            return math.sqrt(float(_sellmeier(crystal.sellmeier_o, np.float64(edge))))
        return float(idler_index)

    ns, ni = n_o(lam_s), n_o(lam_i)
    ks = 2 * math.pi * fs * ns / SPEED_OF_LIGHT
    ki = 2 * math.pi * fi * ni / SPEED_OF_LIGHT
    ts = math.asin(math.sin(theta_ext) / ns)
    s = ks * math.sin(ts) / ki
    if abs(s) > 1:
        return None
    return pump_wave_number(crystal, pump) - ks * math.cos(ts) - ki * math.cos(math.asin(s))


def phase_matching_branch(nu, crystal: CrystalSpec, pump: PumpSpec, theta_max=math.radians(30),
                          idler_index=None):
    """External signal angle >= 0 where Delta_z = 0, per detuning; NaN if none in [0, theta_max].

    Delta_z grows with the emission angle, so a root exists when Delta_z <= 0
    on axis and Delta_z >= 0 at ``theta_max`` (or at the largest angle the idler
    can still match). ``idler_index`` is as in :func:`branch_detuning_span`;
    the default None leaves points outside the Sellmeier window as NaN.
    """
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    out = np.full(nu.shape, np.nan)
    for j, v in enumerate(nu):
        try:
            f0 = _mismatch_scalar(v, 0.0, crystal, pump, idler_index)
        except DomainError:
            continue
        if f0 is None or f0 > 0:
            continue
        if f0 == 0:
            out[j] = 0.0
            continue
        top = _top_angle(v, theta_max, crystal, pump, idler_index)
        f_top = _mismatch_scalar(v, top, crystal, pump, idler_index)
        if f_top is None or f_top < 0:
            continue
        out[j] = brentq(
            lambda t: _mismatch_scalar(v, t, crystal, pump, idler_index), 0.0, top, xtol=1e-13
        )
    return out


def _top_angle(nu, theta_max, crystal, pump, idler_index):
    if _mismatch_scalar(nu, theta_max, crystal, pump, idler_index) is not None:
        return theta_max
    lo, hi = 0.0, theta_max
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _mismatch_scalar(nu, mid, crystal, pump, idler_index) is None:
            hi = mid
        else:
            lo = mid
    return lo


def branch_detuning_span(
    crystal: CrystalSpec,
    pump: PumpSpec,
    theta_max=math.radians(9.5),
    nu_limits=(-450e12, 455e12),
    step=1e12,
    idler_index="edge",
):
    """Detuning interval whose phase-matched emission stays within +-theta_max.

    Scans outward from the degenerate point until no phase-matched angle in
    [0, theta_max] remains, then refines each edge by bisection. Near the upper
    edge the idler falls far into the infrared; its index there only enters
    through a small k_i, so ``idler_index`` ("edge" clamps to the window
    boundary, a float fixes it) has little influence on the result. A float
    far from the edge value puts a step in k_i at the window boundary, which
    can cut the branch short there.

    Returns:
        (nu_low, nu_high) in Hz.
    """

    def matched(v):
        f0 = _mismatch_scalar(v, 0.0, crystal, pump, idler_index)
        if f0 is None:
            return False
        if f0 == 0:
            return True
        if f0 > 0:
            return False
        top = _top_angle(v, theta_max, crystal, pump, idler_index)
        f_top = _mismatch_scalar(v, top, crystal, pump, idler_index)
        return f_top is not None and f_top >= 0

    if not matched(0.0):
        raise PhaseMatchingError("degenerate collinear point is not phase matched; solve the cut angle first")

    def edge(direction, limit):
        inside = 0.0
        v = direction * step
        while direction * v <= direction * limit:
            if not matched(v):
                break
            inside = v
            v += direction * step
        else:
            return limit
        outside = v
        for _ in range(50):
            mid = 0.5 * (inside + outside)
            if matched(mid):
                inside = mid
            else:
                outside = mid
        return inside

    return edge(-1.0, nu_limits[0]), edge(1.0, nu_limits[1])

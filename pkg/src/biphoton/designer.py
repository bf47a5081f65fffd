"""Design sweeps: bandwidth versus waist, gamma optimization, rate scaling."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .collection import coincidence_rate, matched_modes
from .phasematching import detuning_to_omega
from .spectra import bandwidth, transformed_spectra, transformed_spectrum

__all__ = [
    "BoundaryWarning",
    "GammaResult",
    "SmallWaistWarning",
    "SweepResult",
    "golden_section_max",
    "optimize_gamma",
    "peak_rate",
    "rate_vs_waist",
    "waist_sweep",
]

SMALL_WAIST = 100e-6


class BoundaryWarning(UserWarning):
    """The optimum sits on the edge of the search bracket."""


class SmallWaistWarning(UserWarning):
    """Waists below ~100 um are outside the loose-focus regime the model assumes."""


@dataclass(frozen=True)
class SweepResult:
    """One-parameter sweep.

    Attributes:
        parameter: Name of the swept parameter.
        unit: Unit of ``values``.
        values: Strictly increasing parameter samples.
        objectives: name -> array with one value per sample.
        extras: Derived scalars (fit slopes ...).
    """

    parameter: str
    unit: str
    values: np.ndarray
    objectives: dict
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or np.any(np.diff(v) <= 0):
            raise ValueError("sweep axis must be strictly increasing")
        for name, obj in self.objectives.items():
            if np.shape(obj) != v.shape:
                raise ValueError(f"objective {name!r} needs one value per sample")
        object.__setattr__(self, "values", v)


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _sorted_axis(values):
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0 or np.any(v <= 0):
        raise ValueError("waists must be a non-empty list of positive values")
    v = np.unique(v)
    return v


def waist_sweep(config, waists=None, modes=("ideal", "anchored"), workers=None) -> SweepResult:
    """Transformed bandwidth per waist, with W_s = W_i = W at the reference wavelength and W_p = W/sqrt(2)."""
    waists = _sorted_axis(config.grids.sweep_waists if waists is None else waists)
    if np.any(waists < SMALL_WAIST):
        warnings.warn(
            f"waists below {SMALL_WAIST * 1e6:.0f} um: the collimated-mode model loses validity and the "
            "computed small-waist bandwidth turnover is only qualitative",
            SmallWaistWarning,
            stacklevel=2,
        )

    def one(w):
        spectra = transformed_spectra(config.with_waist(w), modes)
        return [bandwidth(spectra[m]) for m in modes]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = np.array(_map(one, waists, workers or config.workers))
    objectives = {f"bandwidth_{m}": rows[:, k] for k, m in enumerate(modes)}
    return SweepResult("waist", "m", waists, objectives, {"modes": tuple(modes)})


def golden_section_max(fn, lo, hi, tol=1e-3):
    """Maximize a unimodal ``fn`` on [lo, hi] until the bracket is narrower than ``tol``.

    Returns (x_best, f_best, history) where history lists every (x, f) evaluated.
    """
    if not hi > lo:
        raise ValueError("bracket must satisfy lo < hi")
    invphi = (math.sqrt(5) - 1) / 2
    history = []

    def f(x):
        y = fn(x)
        history.append((x, y))
        return y

    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x), history


@dataclass(frozen=True)
class GammaResult:
    gamma: float
    bandwidth: float
    at_boundary: bool
    history: tuple


def optimize_gamma(config, bracket=None, tol=None) -> GammaResult:
    """Gamma maximizing the ideal transformed bandwidth (golden section)."""
    lo, hi = config.grids.gamma_bracket if bracket is None else bracket
    tol = config.grids.gamma_tol if tol is None else tol

    def objective(g):
        return bandwidth(transformed_spectrum(config.with_gamma(g), "ideal"))

    x, fx, hist = golden_section_max(objective, lo, hi, tol)
    edge = min(x - lo, hi - x) <= tol
    if edge:
        warnings.warn(
            f"gamma optimum {x:.4f} is at the edge of [{lo}, {hi}]; widen the bracket",
            BoundaryWarning,
            stacklevel=2,
        )
    return GammaResult(gamma=x, bandwidth=fx, at_boundary=edge, history=tuple(sorted(hist)))


def peak_rate(config) -> float:
    """Collinear coincidence rate at nu = 0 for the config's waists."""
    omega = float(detuning_to_omega(0.0, config.pump))
    modes = matched_modes(omega, config.pump, config.fiber, config.detection_bandwidth)
    return float(
        coincidence_rate(omega, modes, config.crystal, config.pump,
                         rtol=config.quadrature.rtol, min_panels=config.quadrature.min_panels)
    )


def rate_vs_waist(config, waists=None, workers=None) -> SweepResult:
    """Peak rate per matched waist plus the log-log slope over the sweep."""
    waists = _sorted_axis(config.grids.rate_waists if waists is None else waists)
    rates = np.array(_map(lambda w: peak_rate(config.with_waist(w)), waists, workers or config.workers))
    slope, intercept = np.polyfit(np.log(waists), np.log(rates), 1) if waists.size > 1 else (math.nan, math.nan)
    return SweepResult("waist", "m", waists, {"peak_rate": rates}, {"slope": float(slope), "intercept": float(intercept)})

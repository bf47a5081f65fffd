"""INI configuration: schema, validation and the effective-config dump.

Every key carries its unit in the name (``length_mm``, ``waist_um`` ...).
Missing keys take the defaults below, which describe a 2 mm BBO crystal
pumped at 325 nm and a 600 /mm grating. ``auto`` is accepted for the cut
angle, the grating incidence angle and the fiber-train magnification; those
are solved when the config is built.
"""
from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .collection import FiberTrainSpec, select_gamma_train
from .grating import GratingSpec, solve_theta0
from .optics import CrystalSpec, DomainError, solve_cut_angle
from .phasematching import PumpSpec

__all__ = [
    "ConfigError",
    "GridSpec",
    "QuadratureSpec",
    "RunConfig",
    "default_config",
    "dump_effective_config",
    "load_config",
    "parse_config",
]

EFFICIENCY_CHOICES = ("ideal", "anchored", "both")


class ConfigError(ValueError):
    """Malformed or invalid configuration."""


@dataclass(frozen=True)
class GridSpec:
    """Sampling grids. Frequencies in Hz, angles in radians, waists in meters."""

    spectrum_span: float = 250e12
    spectrum_points: int = 1001
    xmap_nu: tuple = (-200e12, 500e12)
    xmap_theta: tuple = (-math.radians(10.0), math.radians(10.0))
    xmap_resolution: tuple = (1000, 600)
    g2_padding: int = 8
    sweep_waists: tuple = tuple(w * 1e-6 for w in (20, 30, 48, 75, 100, 150, 200, 300, 400, 500, 600))
    rate_waists: tuple = tuple(w * 1e-6 for w in (100, 150, 200, 300, 400, 500))
    gamma_bracket: tuple = (0.95, 1.15)
    gamma_tol: float = 1e-3

    def __post_init__(self):
        if not self.spectrum_span > 0:
            raise ValueError("grids.spectrum_span_thz must be positive")
        if self.spectrum_points < 3:
            raise ValueError("grids.spectrum_points must be at least 3")
        if not self.xmap_nu[1] > self.xmap_nu[0]:
            raise ValueError("grids.xmap_nu_thz must be increasing")
        if not self.xmap_theta[1] > self.xmap_theta[0]:
            raise ValueError("grids.xmap_theta_deg must be increasing")
        if min(self.xmap_resolution) < 2:
            raise ValueError("grids.xmap_points needs at least 2 points per axis")
        if self.g2_padding < 8:
            raise ValueError("grids.g2_padding must be at least 8")
        for name in ("sweep_waists", "rate_waists"):
            w = getattr(self, name)
            if not w or any(x <= 0 for x in w) or any(b <= a for a, b in zip(w, w[1:])):
                raise ValueError(f"grids.{name}_um must be positive and strictly increasing")
        lo, hi = self.gamma_bracket
        if not 0 < lo < hi:
            raise ValueError("grids.gamma_bracket must satisfy 0 < low < high")
        if not self.gamma_tol > 0:
            raise ValueError("grids.gamma_tol must be positive")


@dataclass(frozen=True)
class QuadratureSpec:
    rtol: float = 1e-8
    min_panels: int = 64

    def __post_init__(self):
        if not 0 < self.rtol < 1:
            raise ValueError("quadrature.rtol must lie in (0, 1)")
        if self.min_panels < 2:
            raise ValueError("quadrature.min_panels must be at least 2")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration for every pipeline."""

    crystal: CrystalSpec
    pump: PumpSpec
    fiber: FiberTrainSpec
    grating: GratingSpec
    grids: GridSpec = field(default_factory=GridSpec)
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    target_waist: float = 48e-6
    detection_bandwidth: float = 2 * math.pi * 3.2e12
    efficiency_mode: str = "both"
    output_dir: str = "out"
    workers: int = 1

    def __post_init__(self):
        if self.efficiency_mode not in EFFICIENCY_CHOICES:
            raise ValueError(f"run.efficiency must be one of {EFFICIENCY_CHOICES}, got {self.efficiency_mode!r}")
        if not self.target_waist > 0:
            raise ValueError("collection.target_waist_um must be positive")
        if not self.detection_bandwidth > 0:
            raise ValueError("collection.bandwidth_thz must be positive")
        if self.workers < 1:
            raise ValueError("run.workers must be at least 1")

    def with_waist(self, waist: float) -> "RunConfig":
        """Collection waist ``waist`` at the reference wavelength, pump waist waist/sqrt(2), Gamma re-solved."""
        fiber = replace(self.fiber, magnification=1.0)
        gamma = select_gamma_train(waist, fiber.reference_wavelength, fiber)
        return replace(
            self,
            target_waist=float(waist),
            pump=replace(self.pump, waist=waist / math.sqrt(2)),
            fiber=replace(fiber, magnification=gamma),
        )

    def with_gamma(self, gamma: float) -> "RunConfig":
        return replace(self, grating=self.grating.with_gamma(gamma))

    def with_efficiency_mode(self, mode: str) -> "RunConfig":
        return replace(self, efficiency_mode=mode)


# (section, key, default text, kind, description)
_SCHEMA = [
    ("crystal", "name", "BBO (Eimerl 1987)", "str", "label carried into metadata"),
    ("crystal", "length_mm", "2.0", "float", "crystal length"),
    ("crystal", "sellmeier_o", "2.7405, 0.0184, 0.0179, 0.0155", "coeffs", "A, B, C, D of n_o^2, lambda in um"),
    ("crystal", "sellmeier_e", "2.3730, 0.0128, 0.0156, 0.0044", "coeffs", "A, B, C, D of n_e^2, lambda in um"),
    ("crystal", "window_um", "0.20, 1.10", "pair", "Sellmeier validity window"),
    ("crystal", "cut_angle_deg", "auto", "auto_float", "optic-axis angle; auto = collinear degenerate"),
    ("crystal", "walkoff_um", "50", "float", "pump lateral drift over the full length"),
    ("crystal", "walkoff_axis", "x", "choice:x,y", "drift direction relative to the tilt plane (x)"),
    ("pump", "wavelength_nm", "325", "float", "pump wavelength"),
    ("pump", "waist_um", "34", "float", "pump waist"),
    ("fiber", "numerical_aperture", "0.12", "float", "single-mode fiber N.A."),
    ("fiber", "reference_wavelength_nm", "650", "float", "wavelength where Gamma is chosen"),
    ("fiber", "magnification", "auto", "auto_float", "Gamma; auto = target_waist / W_f(reference)"),
    ("collection", "target_waist_um", "48", "float", "collection waist at the reference wavelength"),
    ("collection", "bandwidth_thz", "3.2", "float", "detection bandwidth delta_omega / 2 pi"),
    ("grating", "groove_density_per_mm", "600", "float", "groove density"),
    ("grating", "central_wavelength_nm", "650", "float", "wavelength sent along the fiber axis"),
    ("grating", "theta0_deg", "auto", "auto_float", "incidence angle; auto = arcsin(lambda_c D)"),
    ("grating", "gamma", "1.05", "float", "angular magnification crystal -> grating"),
    ("grating", "efficiency_anchors", "500:0.25, 750:0.70", "anchors", "wavelength_nm:efficiency pairs"),
    ("grids", "spectrum_span_thz", "250", "float", "spectra cover [-span, +span]"),
    ("grids", "spectrum_points", "1001", "int", "samples per spectrum"),
    ("grids", "xmap_nu_thz", "-200, 500", "pair", "detuning range of the frequency-angle map"),
    ("grids", "xmap_theta_deg", "-10, 10", "pair", "external angle range of the map"),
    ("grids", "xmap_points", "1000, 600", "intpair", "map samples (nu, theta)"),
    ("grids", "g2_padding", "8", "int", "zero-padding factor for G2"),
    ("grids", "sweep_waists_um", "20, 30, 48, 75, 100, 150, 200, 300, 400, 500, 600", "list", "waist sweep"),
    ("grids", "rate_waists_um", "100, 150, 200, 300, 400, 500", "list", "rate-scaling sweep"),
    ("grids", "gamma_bracket", "0.95, 1.15", "pair", "golden-section bracket for gamma"),
    ("grids", "gamma_tol", "1e-3", "float", "absolute tolerance on gamma"),
    ("quadrature", "rtol", "1e-8", "float", "z-quadrature tolerance relative to the envelope integral"),
    ("quadrature", "min_panels", "64", "int", "initial Simpson panels"),
    ("run", "efficiency", "both", "choice:ideal,anchored,both", "grating efficiency model(s) to run"),
    ("run", "output_dir", "out", "str", "default output directory"),
    ("run", "workers", "1", "int", "threads for sweeps"),
]

_KEYS = {(s, k): (d, kind) for s, k, d, kind, _ in _SCHEMA}
_SECTIONS = list(dict.fromkeys(s for s, *_ in _SCHEMA))


def _floats(text, n=None):
    parts = [p.strip() for p in text.split(",") if p.strip()]
    vals = [float(p) for p in parts]
    if n is not None and len(vals) != n:
        raise ValueError(f"expected {n} comma-separated numbers, got {len(vals)}")
    return vals


def _convert(kind: str, text: str):
    text = text.strip()
    if kind == "str":
        return text
    if kind == "float":
        return float(text)
    if kind == "int":
        v = float(text)
        if v != int(v):
            raise ValueError(f"expected an integer, got {text!r}")
        return int(v)
    if kind == "auto_float":
        return None if text.lower() == "auto" else float(text)
    if kind == "coeffs":
        return tuple(_floats(text, 4))
    if kind == "pair":
        return tuple(_floats(text, 2))
    if kind == "intpair":
        return tuple(int(v) for v in _floats(text, 2))
    if kind == "list":
        return tuple(_floats(text))
    if kind == "anchors":
        out = []
        for item in text.split(","):
            if not item.strip():
                continue
            w, _, e = item.partition(":")
            if not _:
                raise ValueError(f"anchor {item.strip()!r} must look like wavelength_nm:efficiency")
            out.append((float(w) * 1e-9, float(e)))
        return tuple(out)
    if kind.startswith("choice:"):
        options = kind.split(":", 1)[1].split(",")
        if text not in options:
            raise ValueError(f"expected one of {options}, got {text!r}")
        return text
    raise AssertionError(kind)


def _locate(text: str, section: str, key: str):
    """Line number of ``key`` inside ``[section]``, or None."""
    current = None
    for n, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        m = re.match(r"\[(.+)\]$", stripped)
        if m:
            current = m.group(1).strip()
        elif current == section and re.match(rf"{re.escape(key)}\s*[=:]", stripped):
            return n
    return None


def _build(values: dict) -> RunConfig:
    v = values
    g = lambda s, k: v[(s, k)]  # noqa: E731
    base = CrystalSpec(
        length=g("crystal", "length_mm") * 1e-3,
        sellmeier_o=g("crystal", "sellmeier_o"),
        sellmeier_e=g("crystal", "sellmeier_e"),
        walkoff_displacement=g("crystal", "walkoff_um") * 1e-6,
        window=tuple(x * 1e-6 for x in g("crystal", "window_um")),
        name=g("crystal", "name"),
        walkoff_axis=g("crystal", "walkoff_axis"),
    )
    pump = PumpSpec(wavelength=g("pump", "wavelength_nm") * 1e-9, waist=g("pump", "waist_um") * 1e-6)
    cut = g("crystal", "cut_angle_deg")
    crystal = base.with_cut_angle(solve_cut_angle(base, pump.wavelength) if cut is None else math.radians(cut))

    fiber = FiberTrainSpec(
        numerical_aperture=g("fiber", "numerical_aperture"),
        reference_wavelength=g("fiber", "reference_wavelength_nm") * 1e-9,
    )
    target = g("collection", "target_waist_um") * 1e-6
    mag = g("fiber", "magnification")
    if mag is None:
        mag = select_gamma_train(target, fiber.reference_wavelength, fiber)
    fiber = replace(fiber, magnification=mag)

    density = g("grating", "groove_density_per_mm") * 1e3
    theta0 = g("grating", "theta0_deg")
    if theta0 is None:
        theta0 = solve_theta0(density, g("grating", "central_wavelength_nm") * 1e-9)
    else:
        theta0 = math.radians(theta0)
    mode = g("run", "efficiency")
    grating = GratingSpec(
        groove_density=density,
        theta0=theta0,
        gamma=g("grating", "gamma"),
        efficiency_anchors=g("grating", "efficiency_anchors"),
        efficiency_mode="ideal" if mode == "ideal" else "anchored",
    )
    grids = GridSpec(
        spectrum_span=g("grids", "spectrum_span_thz") * 1e12,
        spectrum_points=g("grids", "spectrum_points"),
        xmap_nu=tuple(x * 1e12 for x in g("grids", "xmap_nu_thz")),
        xmap_theta=tuple(math.radians(x) for x in g("grids", "xmap_theta_deg")),
        xmap_resolution=g("grids", "xmap_points"),
        g2_padding=g("grids", "g2_padding"),
        sweep_waists=tuple(x * 1e-6 for x in g("grids", "sweep_waists_um")),
        rate_waists=tuple(x * 1e-6 for x in g("grids", "rate_waists_um")),
        gamma_bracket=g("grids", "gamma_bracket"),
        gamma_tol=g("grids", "gamma_tol"),
    )
    quad = QuadratureSpec(rtol=g("quadrature", "rtol"), min_panels=g("quadrature", "min_panels"))
    return RunConfig(
        crystal=crystal,
        pump=pump,
        fiber=fiber,
        grating=grating,
        grids=grids,
        quadrature=quad,
        target_waist=target,
        detection_bandwidth=2 * math.pi * g("collection", "bandwidth_thz") * 1e12,
        efficiency_mode=mode,
        output_dir=g("run", "output_dir"),
        workers=g("run", "workers"),
    )


@dataclass
class _Parsed:
    config: RunConfig
    given: dict  # (section, key) -> raw text supplied by the user


def _parse(text: str, source: str = "<string>", overrides=None) -> _Parsed:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: parse error: {exc}") from exc
    given = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            line = _locate_section(text, section)
            raise ConfigError(f"{source}:{line}: unknown section [{section}]")
        for key, raw in parser.items(section):
            if (section, key) not in _KEYS:
                line = _locate(text, section, key)
                raise ConfigError(f"{source}:{line}: unknown key {section}.{key}")
            given[(section, key)] = raw.strip()
    for (section, key), raw in (overrides or {}).items():
        if (section, key) not in _KEYS:
            raise ConfigError(f"unknown override {section}.{key}")
        given[(section, key)] = str(raw)
    values = {}
    for (section, key), (default, kind) in _KEYS.items():
        raw = given.get((section, key), default)
        try:
            values[(section, key)] = _convert(kind, raw)
        except ValueError as exc:
            line = _locate(text, section, key)
            raise ConfigError(f"{source}:{line}: {section}.{key}: {exc}") from exc
    try:
        config = _build(values)
    except DomainError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"{source}: invalid value: {exc}") from exc
    return _Parsed(config, given)


def _locate_section(text, section):
    for n, line in enumerate(text.splitlines(), 1):
        if line.strip() == f"[{section}]":
            return n
    return None


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    """Build a :class:`RunConfig` from INI text."""
    return _parse(text, source).config


def load_config(path=None) -> RunConfig:
    """Read an INI file; ``None`` gives the defaults."""
    return load_config_with_dump(path)[0]


def load_config_with_dump(path=None, overrides=None):
    """Return (config, effective-config text).

    ``overrides`` maps (section, key) to raw text and wins over the file.
    """
    if path is None:
        text, source = "", "<defaults>"
    else:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"{path}: cannot read config: {exc}") from exc
        source = str(p)
    parsed = _parse(text, source, overrides)
    return parsed.config, _dump(parsed)


def default_config() -> RunConfig:
    return parse_config("", "<defaults>")


def _resolved_note(config: RunConfig, section: str, key: str):
    if (section, key) == ("crystal", "cut_angle_deg"):
        return f"resolved {math.degrees(config.crystal.cut_angle):.12g}"
    if (section, key) == ("grating", "theta0_deg"):
        return f"resolved {math.degrees(config.grating.theta0):.12g}"
    if (section, key) == ("fiber", "magnification"):
        return f"resolved {config.fiber.magnification:.12g}"
    return None


def _dump(parsed: _Parsed) -> str:
    lines = ["# effective configuration; values marked 'default' were not set in the input", ""]
    for section in _SECTIONS:
        lines.append(f"[{section}]")
        for s, key, default, kind, desc in _SCHEMA:
            if s != section:
                continue
            raw = parsed.given.get((s, key))
            notes = [] if raw is not None else ["default"]
            note = _resolved_note(parsed.config, s, key)
            if note and (raw if raw is not None else default).lower() == "auto":
                notes.append(note)
            text = raw if raw is not None else default
            suffix = f"  # {'; '.join(notes)}" if notes else ""
            lines.append(f"{key} = {text}{suffix}")
        lines.append("")
    return "\n".join(lines)


def dump_effective_config(path=None) -> str:
    """Effective-config text for the file at ``path`` (defaults if None)."""
    return load_config_with_dump(path)[1]

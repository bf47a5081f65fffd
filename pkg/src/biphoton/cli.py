"""Command-line interface.

Every subcommand computes first, then writes its files plus
``effective_config.ini`` into the output directory. Exit codes: 0 success,
2 configuration error, 3 numerical or domain error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .collection import NumericalError
from .config import ConfigError, load_config_with_dump
from .designer import optimize_gamma, rate_vs_waist, waist_sweep
from .grating import angle_for_frequency, efficiency
from .io import csv_text, json_text, matrix_text, read_spectrum_csv
from .optics import DomainError
from .phasematching import branch_detuning_span, detuning_to_omega, intensity_grid
from .spectra import (
    bandwidth,
    central_value,
    correlation_function,
    correlation_time,
    initial_spectrum,
    transformed_spectra,
)

log = logging.getLogger("biphoton")

SUBCOMMANDS = ("xmap", "spectrum", "g2", "sweep-waist", "optimize-gamma", "rate-sweep", "report")
EXIT_CONFIG, EXIT_NUMERICAL = 2, 3


def _modes(config):
    return ("ideal", "anchored") if config.efficiency_mode == "both" else (config.efficiency_mode,)


def _spectrum_files(name, s):
    cols = [("nu_THz", s.nu / 1e12), ("rate_au", s.rate)]
    if s.amplitude is not None:
        cols.append(("amplitude_au", s.amplitude))
    meta = dict(s.metadata)
    meta.update(
        bandwidth_THz=bandwidth(s) / 1e12,
        central_value_au=central_value(s),
        raw_peak_au=float(s.rate.max()),
        columns=["nu_THz", "rate_au"] + (["amplitude_au"] if s.amplitude is not None else []),
    )
    return [(f"{name}.csv", csv_text(cols)), (f"{name}.json", json_text(meta))]


def _all_spectra(config, modes):
    out = {"spectrum_initial": initial_spectrum(config)}
    for mode, s in transformed_spectra(config, modes).items():
        out[f"spectrum_transformed_{mode}"] = s
    return out


def cmd_xmap(config, args):
    g = config.grids
    kw = dict(nu_range=g.xmap_nu, theta_range=g.xmap_theta, resolution=g.xmap_resolution)
    with np.errstate(invalid="ignore"):
        shift = lambda nu: angle_for_frequency(detuning_to_omega(nu, config.pump), config.grating, strict=False)  # noqa: E731
        grids = {
            "xmap_initial": intensity_grid(config.crystal, config.pump, **kw),
            "xmap_transformed": intensity_grid(config.crystal, config.pump, theta_shift=shift, **kw),
        }
        collect = shift(grids["xmap_initial"].nu)
    files = []
    for name, grid in grids.items():
        nu2, th2 = np.meshgrid(grid.nu, grid.theta)
        files.append((f"{name}.csv", csv_text(
            [("nu_THz", nu2 / 1e12), ("theta_deg", np.degrees(th2)), ("intensity", grid.intensity)]
        )))
        files.append((f"{name}_matrix.txt", matrix_text(
            grid.intensity, np.degrees(grid.theta), grid.nu / 1e12, "theta_deg", "nu_THz"
        )))
    nu = grids["xmap_initial"].nu
    files.append(("xmap_collection.csv", csv_text([
        ("nu_THz", nu / 1e12),
        ("theta_initial_deg", np.zeros_like(nu)),
        ("theta_grating_deg", np.degrees(collect)),
    ])))
    lo, hi = branch_detuning_span(config.crystal, config.pump, math.radians(9.5))
    meta = {
        name: {"raw_max": gr.raw_max, "masked_points": gr.masked, "shape_theta_nu": list(gr.intensity.shape)}
        for name, gr in grids.items()
    }
    meta["branch_span_9p5deg_THz"] = [lo / 1e12, hi / 1e12]
    meta["transformed_frame"] = "theta_deg is measured from the grating collection angle theta_c(nu)"
    files.append(("xmap.json", json_text(meta)))
    return files


def cmd_spectrum(config, args):
    files = []
    for name, s in _all_spectra(config, _modes(config)).items():
        files += _spectrum_files(name, s)
    return files


def _g2_files(name, s, padding):
    g = correlation_function(s, padding)
    dt = correlation_time(g)
    keep = np.abs(g.tau) <= 200e-15
    meta = {"correlation_time_fs": dt * 1e15, "bandwidth_THz": bandwidth(s) / 1e12, **g.metadata}
    meta["time_bandwidth_product"] = bandwidth(s) * dt
    return [
        (f"{name}.csv", csv_text([("tau_fs", g.tau[keep] * 1e15), ("g2", g.g2[keep])])),
        (f"{name}.json", json_text(meta)),
    ]


def cmd_g2(config, args):
    pad = config.grids.g2_padding
    if args.input:
        s = read_spectrum_csv(args.input)
        return _g2_files(f"g2_{Path(args.input).stem}", s, pad)
    files = []
    for name, s in _all_spectra(config, _modes(config)).items():
        files += _g2_files(name.replace("spectrum", "g2"), s, pad)
    return files


def cmd_sweep_waist(config, args):
    modes = _modes(config)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        r = waist_sweep(config, modes=modes)
    for w in caught:
        log.warning("%s", w.message)
    cols = [("waist_um", r.values * 1e6)] + [(f"{k}_THz", v / 1e12) for k, v in r.objectives.items()]
    return [("sweep_waist.csv", csv_text(cols))]


def cmd_rate_sweep(config, args):
    r = rate_vs_waist(config)
    return [
        ("rate_sweep.csv", csv_text([("waist_um", r.values * 1e6), ("peak_rate_au", r.objectives["peak_rate"])])),
        ("rate_sweep.json", json_text({"loglog_slope": r.extras["slope"], "waists_um": r.values * 1e6})),
    ]


def cmd_optimize_gamma(config, args):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = optimize_gamma(config)
    for w in caught:
        log.warning("%s", w.message)
    g, b = zip(*res.history)
    # golden section may revisit a point; keep the axis strictly increasing
    g, idx = np.unique(np.array(g), return_index=True)
    b = np.array(b)[idx]
    return [
        ("optimize_gamma.csv", csv_text([("gamma", g), ("bandwidth_ideal_THz", b / 1e12)])),
        ("optimize_gamma.json", json_text({
            "gamma_opt": res.gamma,
            "bandwidth_ideal_THz": res.bandwidth / 1e12,
            "at_boundary": res.at_boundary,
            "bracket": list(config.grids.gamma_bracket),
            "tol": config.grids.gamma_tol,
        })),
    ]


def build_report(config) -> dict:
    spectra = _all_spectra(config, ("ideal", "anchored"))
    names = {
        "initial": spectra["spectrum_initial"],
        "transformed_ideal": spectra["spectrum_transformed_ideal"],
        "transformed_anchored": spectra["spectrum_transformed_anchored"],
    }
    bw = {k: bandwidth(s) for k, s in names.items()}
    dt = {k: correlation_time(correlation_function(s, config.grids.g2_padding)) for k, s in names.items()}
    r_in = central_value(names["initial"])
    eta650 = efficiency(650e-9, config.grating.with_mode("anchored"))
    return {
        "bandwidth_THz": {k: v / 1e12 for k, v in bw.items()},
        "correlation_time_fs": {k: v * 1e15 for k, v in dt.items()},
        "central_ratio": {
            "ideal": central_value(names["transformed_ideal"]) / r_in,
            "anchored": central_value(names["transformed_anchored"]) / r_in,
        },
        "anchored_efficiency_650nm_squared": eta650**2,
        "broadening_factor_anchored": bw["initial"] / bw["transformed_anchored"],
        "broadening_factor_ideal": bw["initial"] / bw["transformed_ideal"],
        "resolved": {
            "cut_angle_deg": math.degrees(config.crystal.cut_angle),
            "theta0_deg": math.degrees(config.grating.theta0),
            "magnification": config.fiber.magnification,
            "gamma": config.grating.gamma,
        },
    }


def cmd_report(config, args):
    return [("report.json", json_text(build_report(config)))]


COMMANDS = {
    "xmap": cmd_xmap,
    "spectrum": cmd_spectrum,
    "g2": cmd_g2,
    "sweep-waist": cmd_sweep_waist,
    "optimize-gamma": cmd_optimize_gamma,
    "rate-sweep": cmd_rate_sweep,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI configuration file (defaults if omitted)")
    common.add_argument("--out", help="output directory (overrides run.output_dir)")
    common.add_argument("--efficiency", choices=("ideal", "anchored", "both"),
                        help="grating efficiency model (overrides run.efficiency)")
    common.add_argument("--quiet", action="store_true", help="only log warnings and errors")
    parser = argparse.ArgumentParser(prog="biphoton", description="Broadband single-mode biphoton source simulator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "xmap": "frequency-angle intensity maps, initial and grating-mapped",
        "spectrum": "initial and transformed coincidence spectra",
        "g2": "second-order correlation functions",
        "sweep-waist": "transformed bandwidth versus collection waist",
        "optimize-gamma": "golden-section search for the relay magnification gamma",
        "rate-sweep": "peak coincidence rate versus waist",
        "report": "bandwidth / correlation-time summary as JSON",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[common], help=helps[name])
        if name == "g2":
            p.add_argument("--input", help="spectrum CSV to transform instead of computing spectra")
    return parser


def _fail(code, exc, command, out_dir):
    record = {"error": type(exc).__name__, "message": str(exc), "exit_code": code, "command": command}
    text = json.dumps(record, sort_keys=True)
    print(text, file=sys.stderr)
    if out_dir is not None:
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / "error.json").write_text(text + "\n", encoding="utf-8")
        except OSError:
            pass
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(levelname)s %(message)s")
    logging.captureWarnings(True)
    out_dir = Path(args.out) if args.out else None
    try:
        overrides = {}
        if args.efficiency:
            overrides[("run", "efficiency")] = args.efficiency
        if args.out:
            overrides[("run", "output_dir")] = args.out
        config, dump = load_config_with_dump(args.config, overrides)
        out_dir = Path(config.output_dir)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"output directory {out_dir} is not writable: {exc}") from exc
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc, args.command, out_dir)

    t0 = time.perf_counter()
    try:
        files = COMMANDS[args.command](config, args)
    except (NumericalError, DomainError, FloatingPointError, ValueError) as exc:
        return _fail(EXIT_NUMERICAL, exc, args.command, out_dir)
    files.append(("effective_config.ini", dump))
    for name, text in files:
        (out_dir / name).write_text(text, encoding="utf-8")
        log.info("wrote %s", out_dir / name)
    log.info("%s finished in %.2f s (kernel backend: %s)", args.command, time.perf_counter() - t0, BACKEND)
    return 0


if __name__ == "__main__":
    sys.exit(main())

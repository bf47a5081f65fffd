"""Compare the compiled and numpy z-quadrature kernels.

Usage:
    python3 benchmarks/bench_kernels.py [--rows N] [--repeat R]

Rows are the (p, q) pairs of the default transformed spectrum plus random
draws over the range the pipelines produce.
"""
import argparse
import time

import numpy as np

from biphoton import _kernels
from biphoton._kernels import _simpson_py
from biphoton.collection import matched_modes, overlap_coefficients
from biphoton.config import default_config
from biphoton.grating import angle_for_frequency
from biphoton.phasematching import detuning_to_omega


def pipeline_rows(config):
    nu = np.linspace(-180e12, 180e12, 721)
    omega = detuning_to_omega(nu, config.pump)
    th_s = angle_for_frequency(omega, config.grating)
    th_i = angle_for_frequency(config.pump.angular_frequency - omega, config.grating)
    modes = matched_modes(omega, config.pump, config.fiber, config.detection_bandwidth, th_s, th_i)
    _, p, q = overlap_coefficients(omega, modes, config.crystal, config.pump)
    return p, q


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=2000, help="random rows on top of the pipeline rows")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    config = default_config()
    p0, q0 = pipeline_rows(config)
    rng = np.random.default_rng(7)
    p = np.concatenate([p0, rng.uniform(0, 3e6, args.rows)])
    q = np.concatenate([q0, rng.uniform(-3e5, 3e5, args.rows)])
    h = 0.5 * config.crystal.length

    print(f"rows: {p.size} (pipeline {p0.size}, random {args.rows}); compiled backend active: {_kernels.BACKEND}")
    t_py, (v_py, e_py, f_py) = best_of(lambda: _simpson_py.gauss_osc_integrals(p, q, h), args.repeat)
    print(f"numpy  : {t_py * 1e3:8.2f} ms  ({e_py.mean():.0f} evaluations/row)")
    if _kernels.BACKEND != "cython":
        print("compiled kernel not built; only the numpy fallback was timed")
        return
    from biphoton._kernels import _simpson

    t_cy, (v_cy, e_cy, f_cy) = best_of(lambda: _simpson.gauss_osc_integrals(p, q, h), args.repeat)
    print(f"cython : {t_cy * 1e3:8.2f} ms  ({e_cy.mean():.0f} evaluations/row)")
    print(f"speedup: {t_py / t_cy:.1f}x")
    env = np.abs(v_py) + 1e-300
    print(f"max |cython - numpy| / |value|: {np.max(np.abs(v_cy - v_py) / env):.2e}; failures: {f_py.sum()} / {f_cy.sum()}")


if __name__ == "__main__":
    main()

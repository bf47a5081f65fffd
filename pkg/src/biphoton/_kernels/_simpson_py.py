"""Pure-numpy fallback for the Gaussian-oscillatory z-quadrature.

Same scheme as the compiled kernel: the panel count is doubled until two
successive Simpson estimates agree to ``15 * rtol`` times the integral of the
envelope. Here rows are processed in vectorised chunks and drop out once
converged.
"""
from __future__ import annotations

import numpy as np

_CHUNK = 64
_BLOCK = 8192


def _f(p, q, z):
    return np.exp(-p * z * z + 1j * q * z)


def _integrate_chunk(p, q, h, rtol, min_panels, max_depth):
    n = min_panels
    z = np.linspace(-h, h, n + 1)
    step = 2 * h / n
    vals = _f(p[:, None], q[:, None], z[None, :])
    trap = step * (vals.sum(axis=1) - 0.5 * (vals[:, 0] + vals[:, -1]))
    env = np.exp(-p[:, None] * z[None, :] ** 2)
    l1 = step * (env.sum(axis=1) - 0.5 * (env[:, 0] + env[:, -1]))
    l1 = np.maximum(l1, 1e-300)
    evals = np.full(p.shape, n + 1, dtype=np.int64)

    out = np.empty(p.shape, dtype=complex)
    done = np.zeros(p.shape, dtype=bool)
    simpson_prev = None
    for _ in range(max_depth + 1):
        active = ~done
        pa, qa = p[active, None], q[active, None]
        mid_sum = np.zeros(pa.shape[0], dtype=complex)
        for lo in range(0, n, _BLOCK):
            mids = -h + step * (np.arange(lo, min(n, lo + _BLOCK)) + 0.5)
            mid_sum += _f(pa, qa, mids[None, :]).sum(axis=1)
        evals[active] += n
        trap_new = 0.5 * trap[active] + 0.5 * step * mid_sum
        simpson = (4 * trap_new - trap[active]) / 3
        trap[active] = trap_new
        if simpson_prev is not None:
            diff = simpson - simpson_prev
            ok = np.abs(diff) <= 15 * rtol * l1[active]
            idx = np.flatnonzero(active)
            out[idx[ok]] = simpson[ok] + diff[ok] / 15
            done[idx[ok]] = True
            simpson_prev = simpson[~ok]
        else:
            simpson_prev = simpson
        n *= 2
        step /= 2
        if done.all():
            break
    failed = ~done
    if failed.any():
        idx = np.flatnonzero(failed)
        out[idx] = simpson_prev
    return out, evals, failed


def gauss_osc_integrals(p, q, half_length, rtol=1e-8, min_panels=64, max_depth=40):
    """Integrate exp(-p z^2 + i q z) over [-half_length, half_length] row by row.

    Returns ``(values, evaluations, failed)``.
    """
    p = np.ascontiguousarray(p, dtype=float).ravel()
    q = np.ascontiguousarray(q, dtype=float).ravel()
    if p.shape != q.shape:
        raise ValueError("p and q must have the same length")
    if min_panels < 1:
        raise ValueError("min_panels must be positive")
    # global doubling caps at 2**18 panels regardless of max_depth (memory bound)
    depth = min(max_depth, max(1, 18 - int(np.log2(min_panels))))
    values = np.empty(p.shape, dtype=complex)
    evals = np.empty(p.shape, dtype=np.int64)
    failed = np.empty(p.shape, dtype=bool)
    for start in range(0, p.size, _CHUNK):
        sl = slice(start, start + _CHUNK)
        values[sl], evals[sl], failed[sl] = _integrate_chunk(
            p[sl], q[sl], half_length, rtol, min_panels, depth
        )
    return values, evals, failed

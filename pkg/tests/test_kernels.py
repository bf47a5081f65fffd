import math
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import erf

from biphoton import _kernels
from biphoton._kernels import _simpson_py

BACKENDS = [_simpson_py.gauss_osc_integrals]
if _kernels.BACKEND == "cython":
    from biphoton._kernels import _simpson

    BACKENDS.append(_simpson.gauss_osc_integrals)

H = 1e-3


@pytest.fixture(params=BACKENDS, ids=lambda f: f.__module__.rsplit(".", 1)[-1])
def kernel(request):
    return request.param


def envelope_l1(p):
    return np.where(p > 0, np.sqrt(np.pi / np.maximum(p, 1e-300)) * erf(np.sqrt(p) * H), 2 * H)


def test_closed_forms(kernel):
    q = np.array([0.0, 1e3, 4e4, 2.5e5])
    v, _, failed = kernel(np.zeros_like(q), q, H)
    exact = np.where(q == 0, 2 * H, 2 * np.sin(q * H) / np.where(q == 0, 1, q))
    assert not failed.any()
    np.testing.assert_allclose(v.real, exact, atol=1e-8 * 2 * H)
    np.testing.assert_allclose(v.imag, 0, atol=1e-12 * H)
    p = np.array([1e4, 1e6, 3e6, 5e7])
    v, _, _ = kernel(p, np.zeros_like(p), H)
    np.testing.assert_allclose(v.real, envelope_l1(p), rtol=1e-8)


def test_against_quad_oracle(kernel, rng):
    p = rng.uniform(0, 3e6, 60)
    q = rng.uniform(-3e5, 3e5, 60)
    v, _, failed = kernel(p, q, H)
    assert not failed.any()
    ref = np.array([2 * quad(lambda z, a=a: math.exp(-a * z * z), 0, H, weight="cos", wvar=b, epsabs=1e-15)[0]
                    for a, b in zip(p, q)])
    assert np.max(np.abs(v.real - ref) / envelope_l1(p)) < 1e-8


def test_non_convergence_is_flagged(kernel):
    # a 7 nm wide Gaussian cannot be resolved within the 2**18 panel cap
    _, evals, failed = kernel(np.array([1e16, 1e6]), np.array([0.0, 0.0]), H)
    assert failed.tolist() == [True, False]
    assert evals[0] > evals[1]


def test_empty_and_shape_checks(kernel):
    v, e, f = kernel(np.array([]), np.array([]), H)
    assert v.size == e.size == f.size == 0
    with pytest.raises(ValueError):
        kernel(np.zeros(3), np.zeros(2), H)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernel not built")
def test_backends_agree(rng):
    p = rng.uniform(0, 3e6, 500)
    q = rng.uniform(-3e5, 3e5, 500)
    a, ea, _ = BACKENDS[0](p, q, H)
    b, eb, _ = BACKENDS[1](p, q, H)
    np.testing.assert_array_equal(ea, eb)
    assert np.max(np.abs(a - b) / envelope_l1(p)) < 1e-12


def test_pure_python_switch():
    env = dict(os.environ, BIPHOTON_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import biphoton; print(biphoton.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"

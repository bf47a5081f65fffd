"""Hot quadrature kernel, compiled when available.

The Cython build is used unless it failed to compile or ``BIPHOTON_PURE_PYTHON``
is set to a non-empty value other than ``0``.
"""
import os

from . import _simpson_py

_force_pure = os.environ.get("BIPHOTON_PURE_PYTHON", "") not in ("", "0")

if _force_pure:
    gauss_osc_integrals = _simpson_py.gauss_osc_integrals
    BACKEND = "python"
else:
    try:
        from ._simpson import gauss_osc_integrals
        BACKEND = "cython"
    except ImportError:
        gauss_osc_integrals = _simpson_py.gauss_osc_integrals
        BACKEND = "python"

python_gauss_osc_integrals = _simpson_py.gauss_osc_integrals

__all__ = ["BACKEND", "gauss_osc_integrals", "python_gauss_osc_integrals"]

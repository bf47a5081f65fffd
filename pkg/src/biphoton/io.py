"""Plain-text output: CSV with unit-suffixed headers, JSON sidecars, dense matrices."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .spectra import Spectrum

__all__ = ["csv_text", "json_text", "matrix_text", "read_spectrum_csv", "round_sig"]

SIG = 9


def _fmt(x) -> str:
    return f"{float(x):.{SIG}g}"


def round_sig(obj):
    """Recursively round floats to 9 significant digits for JSON output."""
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if not math.isfinite(x) else float(_fmt(x))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): round_sig(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [round_sig(v) for v in obj]
    return obj


def csv_text(columns) -> str:
    """``columns`` is a list of (header, 1-D array) pairs of equal length."""
    names = [name for name, _ in columns]
    arrays = [np.asarray(col, dtype=float).ravel() for _, col in columns]
    n = {a.size for a in arrays}
    if len(n) != 1:
        raise ValueError("CSV columns must have equal length")
    buf = io.StringIO()
    buf.write(",".join(names) + "\n")
    stacked = np.column_stack(arrays) if arrays else np.empty((0, 0))
    np.savetxt(buf, stacked, fmt=f"%.{SIG}g", delimiter=",")
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(round_sig(obj), indent=2, sort_keys=True, allow_nan=True) + "\n"


def matrix_text(values, row_axis, col_axis, row_label, col_label) -> str:
    """Dense matrix with the two axes in leading comment lines."""
    buf = io.StringIO()
    buf.write(f"# rows: {row_label}: " + " ".join(_fmt(v) for v in row_axis) + "\n")
    buf.write(f"# columns: {col_label}: " + " ".join(_fmt(v) for v in col_axis) + "\n")
    np.savetxt(buf, np.asarray(values, dtype=float), fmt=f"%.{SIG}g", delimiter=" ")
    return buf.getvalue()


def read_spectrum_csv(path) -> Spectrum:
    """Read a spectrum CSV written by ``biphoton spectrum`` (nu_THz, rate_au[, amplitude_au])."""
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty spectrum file")
    header = [h.strip() for h in rows[0]]
    try:
        i_nu, i_r = header.index("nu_THz"), header.index("rate_au")
    except ValueError as exc:
        raise ValueError(f"{path}: header must contain nu_THz and rate_au, got {header}") from exc
    data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
    amp = data[:, header.index("amplitude_au")] if "amplitude_au" in header else None
    return Spectrum(data[:, i_nu] * 1e12, data[:, i_r], amp, {"kind": Path(path).stem})

"""Golden-section search for maximizing unimodal functions on an interval."""

from __future__ import annotations

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_iterations(width: float, tol: float) -> int:
    if width <= tol:
        return 0
    return int(math.ceil(math.log(tol / width) / math.log(INV_PHI)))


def golden_section_max(f, lo, hi, tol: float = 1e-8):
    """Maximize ``f`` on ``[lo, hi]``, vectorized over lanes.

    ``lo`` and ``hi`` may be arrays; ``f`` must then map an array of points
    (one per lane) to an array of values. The bracket shrinks by the same
    factor in every lane, so all lanes run the same number of iterations.
    The endpoints are compared against the interior estimate at the end,
    which makes boundary maxima of concave functions exact.
    Returns ``(x, f(x))``.
    """
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    a, b = lo.copy(), hi.copy()
    n_iter = golden_iterations(float(np.max(b - a, initial=0.0)), tol)
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(n_iter):
        right = f1 < f2  # maximum lies in [x1, b]
        a = np.where(right, x1, a)
        b = np.where(right, b, x2)
        x1_new = np.where(right, x2, b - INV_PHI * (b - a))
        x2_new = np.where(right, a + INV_PHI * (b - a), x1)
        f_keep = np.where(right, f2, f1)
        probe = np.where(right, x2_new, x1_new)
        f_probe = f(probe)
        f1 = np.where(right, f_keep, f_probe)
        f2 = np.where(right, f_probe, f_keep)
        x1, x2 = x1_new, x2_new

    x = 0.5 * (a + b)
    fx = f(x)
    f_lo, f_hi = f(lo), f(hi)
    x = np.where(f_lo >= fx, lo, x)
    fx = np.maximum(fx, f_lo)
    x = np.where(f_hi > fx, hi, x)
    fx = np.maximum(fx, f_hi)
    if x.ndim == 0:
        return float(x), float(fx)
    return x, fx

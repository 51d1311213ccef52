"""1-D search helpers for boundary solving: golden section and bisection."""

from __future__ import annotations

import math

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-10):
    """Maximum of a unimodal function on [lo, hi]; returns (x, f(x))."""
    a, b = float(lo), float(hi)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    return x, f(x)


def maximize_unimodal(f, lo: float, hi: float, tol: float = 1e-10,
                      pre_scan: int = 33):
    """Golden-section maximum with a coarse unimodality pre-scan.

    If the pre-scan sees more than one strict local maximum, fall back to
    a dense grid and refine only around the best grid point.
    """
    xs = [lo + (hi - lo) * k / (pre_scan - 1) for k in range(pre_scan)]
    ys = [f(x) for x in xs]
    n_peaks = sum(
        1
        for k in range(1, pre_scan - 1)
        if ys[k] > ys[k - 1] and ys[k] > ys[k + 1]
    )
    if n_peaks <= 1:
        return golden_section_max(f, lo, hi, tol)
    dense = 2001
    xs = [lo + (hi - lo) * k / (dense - 1) for k in range(dense)]
    ys = [f(x) for x in xs]
    k = max(range(dense), key=lambda i: ys[i])
    a = xs[max(0, k - 1)]
    b = xs[min(dense - 1, k + 1)]
    return golden_section_max(f, a, b, tol)


def bisect_root(f, lo: float, hi: float, tol: float = 1e-8) -> float:
    """Root of f by bisection; requires a sign change on [lo, hi]."""
    a, b = float(lo), float(hi)
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    while b - a > tol:
        mid = (a + b) / 2.0
        fm = f(mid)
        if fm == 0.0:
            return mid
        if fa * fm < 0.0:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return (a + b) / 2.0

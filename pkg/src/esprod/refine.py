"""Safeguarded Newton/bisection maximization of a smooth 1-D function on a bracket."""

from __future__ import annotations

import math
from typing import Callable

Fn = Callable[[float], float]


def _finite(*xs: float) -> bool:
    return all(math.isfinite(x) for x in xs)


def _newton_on_derivative(df: Fn, d2f: Fn, a: float, b: float,
                          max_iter: int, xtol: float) -> tuple[float, int]:
    """Root of df in [a, b] given df(a) > 0 > df(b).

    Newton steps are refused when they leave the bracket or fail to halve the
    previous step; bisection is used instead.
    """
    x = 0.5 * (a + b)
    dx_old = b - a
    for it in range(1, max_iter + 1):
        d = df(x)
        if not math.isfinite(d):
            raise ArithmeticError("non-finite derivative")
        if d == 0.0:
            return x, it
        if d > 0:
            a = x
        else:
            b = x
        h = d2f(x)
        step_ok = False
        if math.isfinite(h) and h != 0.0:
            x_new = x - d / h
            if abs(x_new - x) < xtol and a <= x_new <= b:
                return x_new, it
            if a < x_new < b and abs(x_new - x) < 0.5 * dx_old:
                step_ok = True
        if not step_ok:
            x_new = 0.5 * (a + b)
        dx_old = abs(x_new - x)
        x = x_new
        if dx_old < xtol or b - a < xtol:
            return x, it
    return x, max_iter


def maximize_in_bracket(f: Fn, df: Fn, d2f: Fn, lo: float, mid: float, hi: float,
                        max_iter: int = 64, xtol: float = 1e-13) -> tuple[float, float, int]:
    """Locally maximize f near ``mid`` without leaving [lo, hi].

    Returns (x, f(x), iterations). If no sign change of df is found on either
    side of mid, or anything turns non-finite, the best of the three probe
    points is returned unchanged.
    """
    probes = [(mid, f(mid)), (lo, f(lo)), (hi, f(hi))]
    best_x, best_v = max(probes, key=lambda p: (p[1], -p[0]))
    if max_iter <= 0:
        return best_x, best_v, 0
    d_lo, d_mid, d_hi = df(lo), df(mid), df(hi)
    if _finite(d_mid) and d_mid == 0.0:
        return (mid, probes[0][1], 0) if probes[0][1] >= best_v else (best_x, best_v, 0)
    if _finite(d_lo, d_mid) and d_lo > 0 > d_mid:
        a, b = lo, mid
    elif _finite(d_mid, d_hi) and d_mid > 0 > d_hi:
        a, b = mid, hi
    else:
        return best_x, best_v, 0
    try:
        x, it = _newton_on_derivative(df, d2f, a, b, max_iter, xtol)
    except ArithmeticError:
        return best_x, best_v, 0
    v = f(x)
    if math.isfinite(v) and v >= best_v:
        return x, v, it
    return best_x, best_v, it

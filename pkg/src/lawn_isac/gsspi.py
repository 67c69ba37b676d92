"""Golden-section search with safeguarded parabolic interpolation (Brent's scheme).

Used for every one-dimensional best response of the game.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))   # 0.381966...
_SQRT_EPS = math.sqrt(2.0 ** -52)


@dataclass(frozen=True)
class LineSearchResult:
    x_opt: float
    f_opt: float
    iterations: int


def gsspi_minimize(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-8,
                   iter_max: int = 25, parabolic: bool = True, history: list | None = None,
                   check_ends: bool = True) -> tuple[float, float, int]:
    """Minimise a unimodal ``f`` on ``[lo, hi]``.

    Golden steps shrink the bracket by 0.618; a parabola through the three best
    points replaces the golden step when its vertex falls inside the bracket and
    the move is shorter than half the step before last.  Stops when the newest
    point moves the incumbent by at most ``tol``, when the bracket is resolved
    to ``tol``, or after ``iter_max`` iterations.  The end points are compared
    at the finish so corner optima are returned exactly.

    ``history`` (if given) receives the bracket ``(a, b)`` after every iteration.
    Returns ``(x_opt, f_opt, iterations)``.
    """
    lo, hi = float(lo), float(hi)
    if not lo < hi:
        raise ValueError(f"invalid bracket [{lo}, {hi}]")
    if tol <= 0:
        raise ValueError("tol must be positive")

    a, b = lo, hi
    x = w = v = a + GOLDEN * (b - a)
    fx = fw = fv = f(x)
    d = e = 0.0
    iterations = 0

    while iterations < iter_max:
        m = 0.5 * (a + b)
        tol1 = _SQRT_EPS * abs(x) + tol / 3.0
        tol2 = 2.0 * tol1
        if abs(x - m) <= tol2 - 0.5 * (b - a):
            break
        iterations += 1

        golden = True
        if parabolic and abs(e) > tol1:
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0:
                p = -p
            q = abs(q)
            e_prev = e
            if abs(p) < abs(0.5 * q * e_prev) and q * (a - x) < p < q * (b - x):
                e = d
                d = p / q
                u = x + d
                if u - a < tol2 or b - u < tol2:
                    d = tol1 if x < m else -tol1
                golden = False
        if golden:
            e = (a - x) if x >= m else (b - x)
            d = GOLDEN * e

        u = x + d if abs(d) >= tol1 else x + math.copysign(tol1, d)
        fu = f(u)
        x_before = x

        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v, fv = w, fw
            w, fw = x, fx
            x, fx = u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv = w, fw
                w, fw = u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu

        if history is not None:
            history.append((a, b))
        if x != x_before and abs(x - x_before) <= tol:
            break

    if check_ends:
        for end in (lo, hi):
            fe = f(end)
            if fe < fx:
                x, fx = end, fe
    return x, fx, iterations

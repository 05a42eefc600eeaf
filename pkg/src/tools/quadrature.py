"""Gauss-Legendre quadrature in mpmath: nodes on [-1, 1] and composite panel rules on segments.

Nodes come from mpmath's GaussLegendre rule and are cached per (level, precision). A level-L rule
has 3 * 2^(L-1) nodes. Callers run under their own mp.workprec; rules are built at that precision.
"""

from functools import lru_cache
from typing import Callable

import mpmath
from mpmath import mp
from mpmath.calculus.quadrature import GaussLegendre

PANEL_WIDTH = mpmath.mpf(1) / 2


def rule_degree(prec: int) -> int:
    """Minimum nodes per panel for a target precision in bits."""
    return max(40, prec // 4)


def rule_level(prec: int) -> int:
    """Smallest GaussLegendre level whose node count reaches rule_degree(prec)."""
    level = 1
    while 3 * 2 ** (level - 1) < rule_degree(prec):
        level += 1
    return level


@lru_cache(maxsize=32)
def legendre_rule(level: int, prec: int) -> tuple[tuple, ...]:
    """((x_i, w_i), ...) for the level-L Gauss-Legendre rule on [-1, 1]."""
    with mp.workprec(prec + 16):
        return tuple(GaussLegendre(mp).calc_nodes(level, prec + 16))


def panel_count(length, width=PANEL_WIDTH) -> int:
    return max(1, int(mpmath.ceil(abs(length) / width)))


def segment_nodes(a, b, prec: int, panels: int | None = None) -> list[tuple]:
    """Composite rule on the straight segment a -> b (real or complex endpoints).

    Returns [(point, weight)] with weights already scaled by the (complex) panel half-length,
    so sum(w * f(x)) approximates the contour integral of f from a to b.
    """
    n = panels or panel_count(b - a)
    rule = legendre_rule(rule_level(prec), prec)
    step = (b - a) / n
    half = step / 2
    out = []
    for p in range(n):
        mid = a + step * p + half
        for x, w in rule:
            out.append((mid + half * x, half * w))
    return out


def integrate_segment(func: Callable, a, b, prec: int, panels: int | None = None):
    """Integral of func along the straight segment a -> b."""
    total = mpmath.mpf(0)
    for x, w in segment_nodes(a, b, prec, panels):
        total += w * func(x)
    return total

"""Special functions at arbitrary precision: zeta and its log-derivatives, polygamma differences,
exact Bernoulli and harmonic numbers, tangent-derivative constants and exponential moments.

Every function takes the target precision P in bits and works at P + GUARD_BITS internally.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from math import comb

import mpmath
from mpmath import mp

from src.config import GUARD_BITS
from src.errors import DomainError, TruncationError
from src.tools.quadrature import PANEL_WIDTH, segment_nodes

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def _bernoulli_table(n: int) -> tuple[Fraction, ...]:
    b = [Fraction(1)]
    for m in range(1, n + 1):
        b.append(-sum(comb(m + 1, j) * b[j] for j in range(m)) / (m + 1))
    return tuple(b)


def bernoulli(n: int) -> Fraction:
    """Exact Bernoulli number B_n with B_1 = -1/2."""
    if n < 0:
        raise DomainError(f"bernoulli: n must be >= 0, got {n}")
    return _bernoulli_table(max(n, 64))[n]


def harmonic(n: int) -> Fraction:
    if n < 0:
        raise DomainError(f"harmonic: n must be >= 0, got {n}")
    return sum((Fraction(1, j) for j in range(1, n + 1)), Fraction(0))


def zeta(s, prec: int):
    if s <= 1:
        raise DomainError(f"zeta: requires real s > 1, got {s}")
    with mp.workprec(prec + GUARD_BITS):
        return +mpmath.zeta(s)


def zeta_logderiv_deriv(j: int, s, prec: int):
    """d^j/ds^j of zeta'(s)/zeta(s) for real s > 1.

    Uses the recurrence L^(n) = (zeta^(n+1) - sum_{i<n} C(n,i) L^(i) zeta^(n-i)) / zeta
    on mpmath's zeta derivatives.
    """
    if j < 0:
        raise DomainError(f"zeta_logderiv_deriv: j must be >= 0, got {j}")
    if s <= 1:
        raise DomainError(f"zeta_logderiv_deriv: requires s > 1, got {s}")
    with mp.workprec(prec + GUARD_BITS + 16):
        z = [mpmath.zeta(s, 1, n) for n in range(j + 2)]
        ell = []
        for n in range(j + 1):
            acc = z[n + 1]
            for i in range(n):
                acc -= comb(n, i) * ell[i] * z[n - i]
            ell.append(acc / z[0])
        return +ell[j]


def _von_mangoldt_table(n_max: int) -> list:
    """log p at prime powers p^e <= n_max, 0 elsewhere (smallest-prime-factor sieve)."""
    spf = list(range(n_max + 1))
    i = 2
    while i * i <= n_max:
        if spf[i] == i:
            for m in range(i * i, n_max + 1, i):
                if spf[m] == m:
                    spf[m] = i
        i += 1
    table = [mpmath.mpf(0)] * (n_max + 1)
    for n in range(2, n_max + 1):
        p = spf[n]
        m = n
        while m % p == 0:
            m //= p
        if m == 1:
            table[n] = mpmath.log(p)
    return table


def von_mangoldt_series(j: int, s, cutoff: int, prec: int) -> tuple:
    """Dirichlet-series route: (-1)^(j+1) sum_{n<=cutoff} Lambda(n) log^j(n) n^-s, with a tail bound.

    Returns (value, tail_bound); the bound uses Lambda(n) <= log n and an integral comparison.
    """
    if s <= 1:
        raise DomainError(f"von_mangoldt_series: requires s > 1, got {s}")
    if cutoff < 2:
        raise TruncationError("von_mangoldt_series: cutoff must be >= 2")
    with mp.workprec(prec + GUARD_BITS):
        table = _von_mangoldt_table(cutoff)
        total = mpmath.mpf(0)
        for n in range(2, cutoff + 1):
            lam = table[n]
            if lam:
                total += lam * mpmath.log(n) ** j * mpmath.power(n, -s)
        sign = -1 if j % 2 == 0 else 1
        # tail: integral of log^(j+1)(x) x^-s from cutoff, upper incomplete gamma form
        sigma = s - 1
        x0 = mpmath.log(cutoff)
        tail = mpmath.gammainc(j + 2, sigma * x0) / sigma ** (j + 2)
        tail += mpmath.log(cutoff) ** (j + 1) * mpmath.power(cutoff, -s)
        return sign * total, tail


def psi_diff(j: int, s, k: int, prec: int):
    """Psi_j(s) = psi^(j-1)(s) - (-1)^(j-1) psi^(j-1)(k-s) for 0 < s < k, where both polygammas are finite."""
    if j < 1:
        raise DomainError(f"psi_diff: j must be >= 1, got {j}")
    if not 0 < s < k:
        raise DomainError(f"psi_diff: s={s} outside (0, {k})")
    with mp.workprec(prec + GUARD_BITS):
        a = mpmath.psi(j - 1, s)
        b = mpmath.psi(j - 1, k - s)
        return a - (-1) ** (j - 1) * b


def zeta_diff(j: int, s, k: int, prec: int):
    """Z_j(s) = L^(j-1)(s) - (-1)^(j-1) L^(j-1)(k-s) with L = zeta'/zeta."""
    if j < 1:
        raise DomainError(f"zeta_diff: j must be >= 1, got {j}")
    if not (s > 1 and k - s > 1):
        raise DomainError(f"zeta_diff: requires 1 < s < k-1, got s={s}, k={k}")
    with mp.workprec(prec + GUARD_BITS):
        a = zeta_logderiv_deriv(j - 1, s, prec)
        b = zeta_logderiv_deriv(j - 1, k - s, prec)
        return a - (-1) ** (j - 1) * b


def tan_deriv_constant(j: int, prec: int):
    """b_j: the (j-1)-th derivative of -(pi/2) tan(pi s / 2) at an even integer s.

    b_j = 0 for odd j; for even j, with i = j - 1,
    b_j = (-1)^((i+1)/2) B_(i+1) (2^(i+1) - 1) pi^(i+1) / (i+1).
    """
    if j < 1:
        raise DomainError(f"tan_deriv_constant: j must be >= 1, got {j}")
    if j % 2:
        return mpmath.mpf(0)
    i = j - 1
    coeff = (-1) ** ((i + 1) // 2) * bernoulli(i + 1) * (2 ** (i + 1) - 1) / (i + 1)
    with mp.workprec(prec + GUARD_BITS):
        return mpmath.mpf(coeff.numerator) / coeff.denominator * mp.pi ** (i + 1)


def moment_cutoff(rate, exponent, prec: int):
    """Smallest V >= 1 (on a half-unit grid) where e^(-rate v) v^exponent past V is below 2^-prec.

    Bound: integral_V^inf e^(-rate v) v^e dv <= e^(-rate V) V^e / (rate - e/V) once rate > e/V.
    """
    target = -(prec + 8) * mpmath.log(2)
    v = mpmath.mpf(1)
    for _ in range(100000):
        slack = rate - exponent / v
        if slack > 0:
            bound = -rate * v + exponent * mpmath.log(v) - mpmath.log(slack)
            if bound < target:
                return v
        v += PANEL_WIDTH
    raise TruncationError("moment_cutoff: no cutoff found")


def exp_moment(n: int, s, m: int, prec: int):
    """integral_1^inf e^(-2 pi n v) v^(s-1) log^m(v) dv by Gauss-Legendre panels plus a tail bound."""
    if n < 1 or m < 0:
        raise DomainError(f"exp_moment: requires n >= 1 and m >= 0, got n={n}, m={m}")
    with mp.workprec(prec + GUARD_BITS):
        rate = 2 * mp.pi * n
        v_max = moment_cutoff(rate, max(s - 1, 0) + m, prec + GUARD_BITS)
        total = mpmath.mpf(0)
        for v, w in segment_nodes(mpmath.mpf(1), v_max, prec + GUARD_BITS):
            lv = mpmath.log(v)
            total += w * mpmath.exp(-rate * v + (s - 1) * lv) * lv**m
        return total

"""Unit tests for special functions: Bernoulli, harmonic, zeta log-derivatives, Psi_j/Z_j, b_j."""

from fractions import Fraction

import mpmath
import pytest
from mpmath import mp

from src.errors import DomainError, TruncationError
from src.specfun import (
    bernoulli,
    exp_moment,
    harmonic,
    moment_cutoff,
    psi_diff,
    tan_deriv_constant,
    von_mangoldt_series,
    zeta,
    zeta_diff,
    zeta_logderiv_deriv,
)


def test_bernoulli_exact_values():
    assert bernoulli(0) == 1
    assert bernoulli(1) == Fraction(-1, 2)
    assert bernoulli(3) == 0
    assert bernoulli(4) == Fraction(-1, 30)
    assert bernoulli(12) == Fraction(-691, 2730)
    assert bernoulli(100) == bernoulli(100)


def test_bernoulli_rejects_negative():
    with pytest.raises(DomainError):
        bernoulli(-1)


def test_harmonic_numbers():
    assert harmonic(0) == 0
    assert harmonic(4) == Fraction(25, 12)


def test_zeta_two(prec):
    with mp.workprec(prec):
        assert abs(zeta(2, prec) - mp.pi**2 / 6) < mpmath.ldexp(1, -prec + 4)


def test_zeta_rejects_pole():
    with pytest.raises(DomainError):
        zeta(1, 64)


def test_logderiv_matches_mpmath_derivative(prec):
    with mp.workprec(prec + 32):
        expected = mpmath.zeta(3, 1, 1) / mpmath.zeta(3)
        assert abs(zeta_logderiv_deriv(0, 3, prec) - expected) < mpmath.ldexp(1, -prec)
        expected = mpmath.diff(lambda s: mpmath.zeta(s, 1, 1) / mpmath.zeta(s), 3)
        assert abs(zeta_logderiv_deriv(1, 3, prec) - expected) < mpmath.mpf(10) ** -25


@pytest.mark.parametrize("j", [0, 1, 2])
def test_von_mangoldt_series_agrees_within_tail(j):
    prec = 64
    value, tail = von_mangoldt_series(j, 6, 3000, prec)
    with mp.workprec(prec + 32):
        assert abs(value - zeta_logderiv_deriv(j, 6, prec)) <= tail + mpmath.ldexp(1, -prec)


def test_von_mangoldt_series_needs_cutoff():
    with pytest.raises(TruncationError):
        von_mangoldt_series(0, 4, 1, 64)


def test_odd_psi_and_zeta_differences_vanish_at_center(prec):
    k = 16
    with mp.workprec(prec):
        assert abs(psi_diff(1, k / 2, k, prec)) < mpmath.ldexp(1, -prec + 4)
        assert abs(zeta_diff(1, k / 2, k, prec)) < mpmath.ldexp(1, -prec + 4)
        assert abs(psi_diff(3, k / 2, k, prec)) < mpmath.ldexp(1, -prec + 8)


def test_zeta_diff_domain():
    with pytest.raises(DomainError):
        zeta_diff(1, 1, 12, 64)


def test_tan_deriv_constants(prec):
    with mp.workprec(prec):
        assert tan_deriv_constant(1, prec) == 0
        assert abs(tan_deriv_constant(2, prec) + mp.pi**2 / 4) < mpmath.ldexp(1, -prec + 4)
        assert tan_deriv_constant(3, prec) == 0
        # (d/ds)^3 of -(pi/2) tan(pi s/2) at s = 0 is -(pi/2)^4 * 2
        assert abs(tan_deriv_constant(4, prec) + 2 * (mp.pi / 2) ** 4) < mpmath.ldexp(1, -prec + 8)


def test_exp_moment_closed_form(prec):
    with mp.workprec(prec):
        expected = mpmath.exp(-2 * mp.pi) / (2 * mp.pi)
        assert abs(exp_moment(1, 1, 0, prec) - expected) < mpmath.ldexp(expected, -prec + 8)


def test_moment_cutoff_grows_with_precision():
    with mp.workprec(64):
        assert moment_cutoff(2 * mp.pi, 10, 64) >= 1
        assert moment_cutoff(2 * mp.pi, 10, 256) > moment_cutoff(2 * mp.pi, 10, 64)


@pytest.mark.parametrize("j", [0, 1, 2, 3])
def test_logderiv_stable_under_precision_doubling(j, prec):
    for s in (2, mpmath.mpf("5.5"), 17):
        low = zeta_logderiv_deriv(j, s, prec)
        high = zeta_logderiv_deriv(j, s, 2 * prec)
        with mp.workprec(2 * prec):
            assert abs(low - high) <= mpmath.ldexp(1 + abs(high), -prec)


@pytest.mark.slow
def test_logderiv_negative_and_increasing_on_two_to_forty(prec):
    grid = [mpmath.mpf(n) / 2 for n in range(4, 81)]
    values = [zeta_logderiv_deriv(0, s, prec) for s in grid]
    slopes = [zeta_logderiv_deriv(1, s, prec) for s in grid]
    assert all(v < 0 for v in values)
    assert all(d > 0 for d in slopes)
    assert all(b > a for a, b in zip(values, values[1:]))


def test_psi_diff_domain_is_open_interval_zero_to_k(prec):
    with mp.workprec(prec):
        assert abs(psi_diff(1, mpmath.mpf("0.5"), 12, prec)) > 0
    for s in (0, 12, -1):
        with pytest.raises(DomainError):
            psi_diff(1, s, 12, prec)


def test_psi_one_is_a_harmonic_difference(prec):
    # psi(n) = -gamma + H_(n-1), so Psi_1(10) at k = 12 is H_9 - H_1
    h = harmonic(9) - harmonic(1)
    with mp.workprec(prec):
        assert abs(psi_diff(1, 10, 12, prec) - mpmath.mpf(h.numerator) / h.denominator) < mpmath.ldexp(1, -prec + 4)


@pytest.mark.slow
@pytest.mark.parametrize("k", [8, 12, 16, 20])
def test_psi_and_zeta_differences_nonnegative_and_nondecreasing_on_grid(k, prec):
    eps = mpmath.ldexp(1, -prec + 16)
    grid = range(k // 2, k - 1)
    for j in range(1, 5):
        for func in (psi_diff, zeta_diff):
            values = [func(j, s, k, prec) for s in grid]
            assert all(v >= -eps for v in values), (func.__name__, j, values)
            assert all(b - a >= -eps for a, b in zip(values, values[1:])), (func.__name__, j)

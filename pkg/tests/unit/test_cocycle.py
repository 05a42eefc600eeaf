"""Unit tests for the eta logarithm, cup powers and the cochain value formula."""

import mpmath
import pytest
from mpmath import mp

from src.cocycle import (
    bar_differential,
    cocycle_constant,
    cocycle_residual,
    correction_polynomial,
    coboundary_residual,
    cup_power,
    eta_log,
    formula_sign,
    interpolation_residual,
    u_log,
    v_one,
    value_formula_residuals,
    verify_value_formula,
)
from src.errors import DomainError
from src.forms import evaluate_form
from src.state import IDENTITY, NEG_I, FormSpec, S, T


def _tiny(x, prec):
    return abs(x) < mpmath.ldexp(1, -prec // 2)


def test_eta_log_matches_discriminant(delta, prec):
    with mp.workprec(prec):
        tau = mpmath.mpc(0, 1)
        assert _tiny(mpmath.exp(24 * eta_log(tau, prec)) / evaluate_form(delta, tau, prec) - 1, prec)


def test_eta_log_rejects_low_points(prec):
    with pytest.raises(DomainError):
        eta_log(mpmath.mpc(0, "0.01"), prec)


def test_u_log_reduction_is_consistent(prec):
    tau = mpmath.mpc("0.1", "0.3")
    with mp.workprec(prec):
        direct = 2 * eta_log(tau, prec, y_min=0.05)
        assert _tiny(u_log(tau, prec) - direct, prec)


def test_u_log_needs_upper_half_plane(prec):
    with pytest.raises(DomainError):
        u_log(mpmath.mpc(1, -1), prec)


def test_v_one_values(prec):
    with mp.workprec(prec):
        tau = mpmath.mpc(0, 2)
        assert _tiny(v_one(S, tau, prec) - mpmath.log(2), prec)
        assert _tiny(v_one(T, tau, prec) - mp.pi * 1j / 6, prec)
        assert v_one(NEG_I, tau, prec) == 0


@pytest.mark.parametrize(
    "gamma,normalization,expected",
    [
        (S, "weight-one", (-1, 2)),
        (T, "weight-one", (1, 6)),
        (IDENTITY, "weight-one", (0, 1)),
        (S, "eta", (-1, 4)),
        (T, "eta", (1, 12)),
    ],
)
def test_cocycle_constants(gamma, normalization, expected, prec):
    c = cocycle_constant(gamma, prec, normalization=normalization)
    with mp.workprec(prec):
        assert _tiny(c.constant - mp.pi * 1j * expected[0] / expected[1], prec)
        assert c.normalization == normalization


def test_cocycle_constant_rejects_unknown_normalization(prec):
    with pytest.raises(DomainError):
        cocycle_constant(S, prec, normalization="half")


def test_cocycle_relation(prec):
    tau = mpmath.mpc("0.2", "1.1")
    assert _tiny(cocycle_residual(S, T, tau, prec), prec)
    assert _tiny(cocycle_residual(T @ S, S, tau, prec), prec)


def test_cup_powers_at_two_i(prec):
    with mp.workprec(prec):
        tau = mpmath.mpc(0, 2)
        log2 = mpmath.log(2)
        assert _tiny(cup_power((S,), tau, prec) - log2, prec)
        assert _tiny(cup_power((S, S), tau, prec) + log2**2, prec)
        assert cup_power((S, NEG_I), tau, prec) == 0


def test_cup_power_needs_elements(prec):
    with pytest.raises(DomainError):
        cup_power((), mpmath.mpc(0, 1), prec)


def test_bar_differential_of_zero_cochain(prec):
    def square(_gammas, w):
        return w**2

    with mp.workprec(prec):
        z = mpmath.mpc("0.3", "1.7")
        value = bar_differential(square, 0, (S,), z, 4, prec)
        assert _tiny(value - (1 - z**2), prec)


def test_bar_differential_arity(prec):
    with pytest.raises(DomainError):
        bar_differential(lambda g, w: w, 1, (S,), mpmath.mpc(0, 1), 4, prec)


def test_correction_polynomial_and_sign(prec):
    p = correction_polynomial(12, 1, prec)
    assert len(p) == 11
    assert p[10] == mpmath.mpc(0, 1)
    assert [formula_sign(m) for m in range(4)] == [1, 1, -1, -1]


def test_value_formula_order_range(prec):
    with pytest.raises(DomainError):
        value_formula_residuals(FormSpec(weight=12, kind="cusp"), 3, [mpmath.mpc(0, 2)], prec)


SAMPLES = [mpmath.mpc(0, 2), mpmath.mpc(1, 2), mpmath.mpc(-1, 3)]


@pytest.mark.slow
@pytest.mark.parametrize("m", [0, 1])
def test_value_formula_for_delta(m, high_prec):
    spec = FormSpec(weight=12, kind="cusp", precision_bits=high_prec)
    assert verify_value_formula(spec, m, SAMPLES, high_prec) < 1e-15


@pytest.mark.slow
def test_value_formula_for_e12(high_prec):
    spec = FormSpec(weight=12, kind="eisenstein", precision_bits=high_prec)
    rows = value_formula_residuals(spec, 1, SAMPLES, high_prec)
    assert len(rows) == 3
    assert max(row["residual"] for row in rows) < 1e-12


@pytest.mark.slow
def test_sigma_takes_polynomial_values(delta, prec):
    assert interpolation_residual(delta, (S, S), prec) < 1e-12


@pytest.mark.slow
def test_coboundary_vanishes(delta, prec):
    assert coboundary_residual(delta, (S, T), mpmath.mpc("0.2", "1.5"), prec) < 1e-12

"""Unit tests for the Gauss-Legendre panel rules."""

import mpmath
from mpmath import mp

from src.tools.quadrature import integrate_segment, legendre_rule, panel_count, rule_degree, rule_level, segment_nodes


def test_rule_level_reaches_requested_degree():
    for prec in (64, 160, 288, 600):
        level = rule_level(prec)
        assert 3 * 2 ** (level - 1) >= rule_degree(prec)
        assert level == 1 or 3 * 2 ** (level - 2) < rule_degree(prec)


def test_rule_weights_and_symmetry(prec):
    with mp.workprec(prec):
        rule = legendre_rule(rule_level(prec), prec)
        assert len(rule) == 3 * 2 ** (rule_level(prec) - 1)
        assert abs(mpmath.fsum(w for _, w in rule) - 2) < mpmath.ldexp(1, -prec + 4)
        xs = sorted(x for x, _ in rule)
        assert all(abs(a + b) < mpmath.ldexp(1, -prec + 4) for a, b in zip(xs, reversed(xs)))


def test_integrate_exponential_on_real_segment(prec):
    with mp.workprec(prec):
        value = integrate_segment(mpmath.exp, mpmath.mpf(0), mpmath.mpf(3), prec)
        assert abs(value - (mp.e**3 - 1)) < mpmath.ldexp(1, -prec + 8)


def test_complex_segment_weights_carry_direction(prec):
    with mp.workprec(prec):
        # integral of z dz from 0 to i is i^2 / 2
        value = integrate_segment(lambda z: z, mpmath.mpc(0), mpmath.mpc(0, 1), prec)
        assert abs(value + mpmath.mpf(1) / 2) < mpmath.ldexp(1, -prec + 4)


def test_panel_count_and_node_layout(prec):
    assert panel_count(mpmath.mpf(3)) == 6
    assert panel_count(mpmath.mpf("0.1")) == 1
    with mp.workprec(prec):
        nodes = segment_nodes(mpmath.mpf(1), mpmath.mpf(2), prec)
        assert len(nodes) == 2 * len(legendre_rule(rule_level(prec), prec))
        assert all(1 < x < 2 for x, _ in nodes)

"""Unit tests for simultaneous root finding and root-geometry classification."""

from fractions import Fraction

import mpmath
import pytest
from mpmath import mp

from src.errors import DomainError
from src.lvalues import critical_table
from src.nodes.pipeline import ClassifyRootsNode
from src.periodpoly import odd_part
from src.roots import classify, find_roots, unit_disk_check
from src.state import LocatedRoot

TOL = 1e-10


def _sorted_values(roots):
    return sorted((r.value for r in roots), key=lambda z: (float(z.real), float(z.imag)))


def test_find_roots_simple_cubic(prec):
    # (z^2 - 1)(z - 2)
    roots = find_roots([2, -1, -2, 1], prec)
    assert len(roots) == 3
    with mp.workprec(prec):
        for got, expected in zip(_sorted_values(roots), (-1, 1, 2)):
            assert abs(got - expected) < mpmath.ldexp(1, -prec // 2)
        assert all(r.radius < mpmath.ldexp(1, -prec // 2) for r in roots)


def test_find_roots_factors_out_origin(prec):
    roots = find_roots([0, 0, 1, 1], prec)
    assert sum(1 for r in roots if r.value == 0) == 2
    assert any(abs(r.value + 1) < 1e-20 for r in roots)


def test_find_roots_rejects_constants(prec):
    with pytest.raises(DomainError):
        find_roots([3], prec)
    with pytest.raises(DomainError):
        find_roots([0, 0], prec)


def test_classify_quadruple_and_circle(prec):
    c = Fraction(-13, 4)
    coeffs = [1, 0, mpmath.mpf(c.numerator) / c.denominator, 0, mpmath.mpf(c.numerator) / c.denominator, 0, 1]
    report = classify(find_roots(coeffs, prec), TOL)
    assert report.counts["quadruple"] == 4
    assert report.counts["on-circle"] == 2
    assert report.counts["unclassified"] == 0
    assert len(report.quadruples) == 1
    assert abs(report.quadruple_a - 2) < 1e-20


def test_classify_delta_odd_part(delta, prec):
    report = classify(find_roots(odd_part(critical_table(delta, 0, prec)), prec), TOL, factored_origin=1)
    assert report.degree == 8
    assert report.counts["on-circle"] == 4
    assert report.counts["quadruple"] == 4
    assert abs(report.quadruple_a - 2) < 1e-20
    assert report.factored_origin == 1
    assert report.max_circle_deviation < TOL


def test_ambiguous_when_disc_straddles_circle():
    root = LocatedRoot(value=mpmath.mpc("1.000000000001", 0), radius=mpmath.mpf("1e-9"))
    report = classify([root], TOL)
    assert report.roots[0].locus == "ambiguous"


def test_cluster_on_one_locus_keeps_label():
    z = mpmath.expj(mpmath.mpf("0.3"))
    roots = [LocatedRoot(value=z, radius=mpmath.mpf("1e-15")), LocatedRoot(value=z * (1 + mpmath.mpf("1e-16")), radius=mpmath.mpf("1e-15"))]
    report = classify(roots, TOL)
    assert report.clusters == [[0, 1]]
    assert [r.locus for r in report.roots] == ["on-circle", "on-circle"]


def test_lone_real_root_is_unclassified():
    report = classify([LocatedRoot(value=mpmath.mpc(3, 0), radius=mpmath.mpf("1e-20"))], TOL)
    assert report.counts["unclassified"] == 1
    assert report.quadruples == []


def test_unit_disk_check(prec):
    ok, witness = unit_disk_check([1, 2], TOL, prec)
    assert ok and abs(witness - mpmath.mpf("0.5")) < 1e-20
    ok, witness = unit_disk_check([2, 1], TOL, prec)
    assert not ok and abs(witness - 2) < 1e-20


def _reciprocal_pair(offset_digits: int, prec: int):
    """Coefficients of (z - r)(z - 1/r) with r = 1 + 10^-offset_digits, held at P + 64 bits."""
    with mp.workprec(prec + 64):
        r = 1 + mpmath.mpf(10) ** -offset_digits
        return [mpmath.mpf(1), -(r + 1 / r), mpmath.mpf(1)]


def test_classify_resolves_tolerance_below_double_precision(high_prec):
    roots = find_roots(_reciprocal_pair(20, high_prec), high_prec)
    for report in (classify(roots, 1e-25, prec=high_prec), classify(roots, 1e-25)):
        assert report.counts["on-circle"] == 0
        assert report.counts["unclassified"] == 2
        assert report.max_circle_deviation is None
    # a tolerance above the offset still accepts both roots
    loose = classify(roots, 1e-15, prec=high_prec)
    assert loose.counts["on-circle"] == 2
    assert 5e-21 < loose.max_circle_deviation < 2e-20


def test_circle_deviation_is_not_rounded_away(high_prec):
    with mp.workprec(high_prec + 64):
        z = mpmath.expj(mpmath.mpf("0.3")) * (1 + mpmath.mpf(10) ** -40)
        root = LocatedRoot(value=z, radius=mpmath.mpf(10) ** -60)
    report = classify([root], 1e-30, prec=high_prec)
    assert report.roots[0].locus == "on-circle"
    assert 5e-41 < report.max_circle_deviation < 2e-40


def test_unit_disk_check_at_working_precision(high_prec):
    with mp.workprec(high_prec + 64):
        q = [-(1 + mpmath.mpf(10) ** -20), mpmath.mpf(1)]
    ok, witness = unit_disk_check(q, 1e-25, high_prec)
    assert not ok
    with mp.workprec(high_prec):
        assert abs(witness - 1 - mpmath.mpf(10) ** -20) < mpmath.mpf(10) ** -40
    ok, _ = unit_disk_check(q, 1e-15, high_prec)
    assert ok


def test_find_roots_vieta(prec):
    # z^4 + 2 z^3 + 7 z^2 - 3 z + 5
    roots = find_roots([5, -3, 7, 2, 1], prec)
    with mp.workprec(prec + 32):
        values = [r.value for r in roots]
        radii = [r.radius for r in roots]
        assert abs(mpmath.fsum(values) + 2) <= mpmath.fsum(radii)
        pairs = mpmath.fsum(values[i] * values[j] for i in range(4) for j in range(i + 1, 4))
        assert abs(pairs - 7) <= 16 * mpmath.fsum(radii)
        product = values[0] * values[1] * values[2] * values[3]
        assert abs(product - 5) <= 2 * abs(product) * mpmath.fsum(r / abs(z) for r, z in zip(radii, values))


def test_find_roots_radii_cover_true_roots_and_residuals(prec):
    # (z - 1)(z + 2)(z^2 + 9)
    coeffs = [-18, 9, 7, 1, 1]
    roots = find_roots(coeffs, prec)
    with mp.workprec(prec + 32):
        for true in (mpmath.mpc(1), mpmath.mpc(-2), mpmath.mpc(0, 3), mpmath.mpc(0, -3)):
            nearest = min(roots, key=lambda r: abs(r.value - true))
            assert abs(nearest.value - true) <= nearest.radius
            assert nearest.radius < mpmath.ldexp(1, -prec // 2)
        descending = [mpmath.mpf(c) for c in reversed(coeffs)]
        for r in roots:
            value, derivative = mpmath.polyval(descending, r.value, derivative=True)
            assert abs(value) <= r.radius * abs(derivative)


def _quadruple_coeffs(scale=1):
    c = mpmath.mpf(-13) / 4
    return [scale * x for x in (1, 0, c, 0, c, 0, 1)]


def test_classify_invariant_under_root_order(prec):
    roots = find_roots(_quadruple_coeffs(), prec)
    base = classify(roots, TOL, prec=prec)
    for order in (list(reversed(roots)), roots[3:] + roots[:3]):
        report = classify(order, TOL, prec=prec)
        assert report.counts == base.counts
        assert abs(report.quadruple_a - base.quadruple_a) < mpmath.ldexp(1, -prec // 2)
        by_value = {mpmath.nstr(r.value, 20): r.locus for r in report.roots}
        assert by_value == {mpmath.nstr(r.value, 20): r.locus for r in base.roots}


def test_classify_invariant_under_polynomial_scaling(prec):
    base = classify(find_roots(_quadruple_coeffs(), prec), TOL, prec=prec)
    for scale in (mpmath.mpf(7) / 3, mpmath.mpf(-1000)):
        report = classify(find_roots(_quadruple_coeffs(scale), prec), TOL, prec=prec)
        assert report.counts == base.counts
        assert abs(report.quadruple_a - base.quadruple_a) < mpmath.ldexp(1, -prec // 2)


def test_classify_node_uses_run_precision(high_prec):
    roots = find_roots(_reciprocal_pair(20, high_prec), high_prec)
    state = {"roots": roots, "tolerance": 1e-25, "precision_bits": high_prec, "scope": {"factored_origin": 0}}
    report = ClassifyRootsNode(state)["root_report"]
    assert report.counts["unclassified"] == 2

"""Unit tests for q-expansions, the Miller basis, Hecke matrices and eigenforms."""

from fractions import Fraction

import mpmath
import pytest
from mpmath import mp
from pydantic import ValidationError

from src.errors import DomainError, TruncationError
from src.forms import (
    MIN_TRUNCATION,
    default_truncation,
    eigenforms,
    eisenstein_constant,
    eisenstein_series,
    evaluate_form,
    form_coefficients,
    hecke_apply,
    hecke_matrix,
    miller_basis,
    required_terms,
    sigma_power,
)
from src.state import FormSpec, FourierCoefficients


def test_sigma_power():
    assert sigma_power(6, 1) == 12
    assert sigma_power(4, 3) == 1 + 8 + 64
    with pytest.raises(DomainError):
        sigma_power(0, 1)


def test_eisenstein_constants():
    assert eisenstein_constant(4) == 240
    assert eisenstein_constant(6) == -504
    assert eisenstein_constant(12) == Fraction(65520, 691)


def test_eisenstein_series_coefficients():
    f = eisenstein_series(4, 5, 64)
    assert f.coeffs[0] == 1
    assert f.coeffs[1] == 240
    assert f.coeffs[2] == 240 * 9
    assert f.spec.kind == "eisenstein"


def test_discriminant_coefficients(delta):
    assert [int(c) for c in delta.coeffs[:5]] == [0, 1, -24, 252, -1472]
    assert int(delta.coeffs[11]) == 534612


def test_miller_basis_is_echelon():
    basis = miller_basis(24, 12)
    assert len(basis) == 2
    assert basis[0][1:3] == [1, 0]
    assert basis[1][1:3] == [0, 1]


def test_miller_basis_needs_cusp_forms():
    with pytest.raises(DomainError):
        miller_basis(14, 10)


def test_hecke_t2_on_delta():
    basis = miller_basis(12, 10)
    m = hecke_matrix(12, 2, basis)
    assert m.shape == (1, 1) and m[0, 0] == -24
    assert hecke_apply(basis[0], 2, 12, 2)[1] == -24


def test_hecke_apply_needs_coefficients():
    with pytest.raises(TruncationError):
        hecke_apply([0, 1, 2], 2, 12, 2)


def test_weight_24_eigenforms_ordered_by_a2(prec):
    forms = eigenforms(24, prec)
    assert len(forms) == 2
    with mp.workprec(prec):
        root = 12 * mpmath.sqrt(144169)
        assert abs(forms[0].coeffs[2] - (540 + root)) < mpmath.mpf(10) ** -25
        assert abs(forms[1].coeffs[2] - (540 - root)) < mpmath.mpf(10) ** -25
        for f in forms:
            assert f.coeffs[0] == 0 and f.coeffs[1] == 1
            # multiplicativity a_6 = a_2 a_3
            assert abs(f.coeffs[6] - f.coeffs[2] * f.coeffs[3]) < mpmath.mpf(10) ** -20 * abs(f.coeffs[6])


def test_eigenforms_reject_weights_without_cusp_forms():
    with pytest.raises(DomainError):
        eigenforms(14, 64)


def test_form_spec_validation():
    with pytest.raises(ValidationError):
        FormSpec(weight=13, kind="cusp")
    with pytest.raises(ValidationError):
        FormSpec(weight=14, kind="cusp")
    with pytest.raises(ValidationError):
        FormSpec(weight=24, kind="cusp", index=2)
    with pytest.raises(ValidationError):
        FormSpec(weight=12, kind="eisenstein", index=1)


def test_default_truncation_floor():
    assert default_truncation(12, 64) >= MIN_TRUNCATION
    assert default_truncation(12, 256, y_min=0.1) > default_truncation(12, 256, y_min=1.0)


def test_required_terms_reports_short_expansions():
    spec = FormSpec(weight=12, kind="cusp", truncation=8)
    f = FourierCoefficients(spec=spec, coeffs=[mpmath.mpf(0), mpmath.mpf(1)] + [mpmath.mpf(0)] * 7)
    with pytest.raises(TruncationError):
        required_terms(f, mpmath.mpf("0.1"), 256)


def test_delta_is_modular(delta, prec):
    with mp.workprec(prec):
        tau = mpmath.mpc(0, 2)
        lhs = evaluate_form(delta, -1 / tau, prec)
        rhs = tau**12 * evaluate_form(delta, tau, prec)
        assert abs(lhs - rhs) < mpmath.ldexp(abs(rhs), -prec + 16)


def test_evaluate_form_respects_y_min(delta):
    with pytest.raises(DomainError):
        evaluate_form(delta, mpmath.mpc(0, "0.01"), 64, y_min=0.05)


def test_form_coefficients_cached():
    spec = FormSpec(weight=16, kind="eisenstein", precision_bits=64)
    assert form_coefficients(spec) is form_coefficients(spec)

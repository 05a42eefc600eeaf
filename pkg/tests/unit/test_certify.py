"""Unit tests for the Enestrom-Kakeya, monotonicity and coefficient-factor certificates."""

from fractions import Fraction

import mpmath
import pytest

from src.certify import coefficient_factor_certificate, ek_certificate, monotonicity_certificate
from src.errors import DomainError
from src.lvalues import critical_table
from src.periodpoly import odd_part, q_decompose, tilde_odd_part
from src.state import FormSpec


def test_ek_passes_nondecreasing_sequence():
    cert = ek_certificate([0, 1, 2, 3], prec=128)
    assert cert.kind == "enestrom-kakeya"
    assert cert.verdict == "pass"
    assert [e.label for e in cert.evidence] == ["w^0", "w^1", "w^2", "w^3"]
    assert cert.evidence[0].difference is None
    assert not any("inconsistent" in n for n in cert.notes)


def test_ek_fails_decreasing_sequence():
    cert = ek_certificate([3, 2, 1], prec=128)
    assert cert.verdict == "fail"


def test_ek_fails_negative_coefficient():
    assert ek_certificate([-1, 2, 3], prec=128).verdict == "fail"


def test_ek_rejects_complex_coefficients():
    with pytest.raises(DomainError):
        ek_certificate([mpmath.mpc(1, 1), 2], prec=128)


def test_ek_on_eisenstein_odd_part(prec):
    table = critical_table(FormSpec(weight=12, kind="eisenstein", precision_bits=prec), 1, prec)
    dec = q_decompose(odd_part(table))
    cert = ek_certificate(dec)
    assert cert.verdict == "pass"
    assert cert.subject["k"] == 12 and cert.subject["m"] == 1
    assert cert.notes[0] == "support n in [2, 4]"


@pytest.mark.parametrize("m", [1, 2])
def test_ek_on_tilde_odd_part(prec, m):
    dec = q_decompose(tilde_odd_part(16, m, prec))
    assert dec.epsilon == (-1) ** m
    assert ek_certificate(dec).verdict == "pass"


def test_monotonicity_certificate(prec):
    cert = monotonicity_certificate(12, 2, grid_step=Fraction(1), prec=prec)
    assert cert.verdict == "pass"
    assert cert.subject == {"k": 12, "j_max": 2}
    # Psi_1, Z_1, Psi_2, Z_2 on 6, 7, 8, 9, 10
    assert len(cert.evidence) == 20
    assert cert.evidence[0].label == "Psi_1(6)"


def test_monotonicity_certificate_domain():
    with pytest.raises(DomainError):
        monotonicity_certificate(10, 2)
    with pytest.raises(DomainError):
        monotonicity_certificate(12, 0)
    with pytest.raises(DomainError):
        monotonicity_certificate(12, 1, grid_step=0)


@pytest.mark.parametrize("k,length", [(8, 2), (12, 3), (24, 6)])
def test_coefficient_factor_certificate(k, length, prec):
    cert = coefficient_factor_certificate(k, prec)
    assert cert.verdict == "pass"
    assert len(cert.evidence) == length
    assert all(e.difference is None or not e.difference.startswith("-") for e in cert.evidence)


def test_coefficient_factor_domain(prec):
    with pytest.raises(DomainError):
        coefficient_factor_certificate(14, prec)

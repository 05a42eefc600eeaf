"""Certificates for the Eisenstein unimodularity theorems: Enestrom-Kakeya coefficient monotonicity,
the monotonicity lemma for Psi_j and Z_j on [k/2, k-2], and the increasing zeta-product coefficients."""

import logging
from fractions import Fraction

import mpmath
from mpmath import mp

from src.config import GUARD_BITS
from src.errors import DomainError
from src.periodpoly import QDecomposition
from src.roots import unit_disk_check
from src.specfun import psi_diff, zeta, zeta_diff
from src.state import Certificate, EvidenceEntry, PeriodPolynomial

logger = logging.getLogger(__name__)

EVIDENCE_DIGITS = 30


def _fmt(x) -> str:
    return mpmath.nstr(x, EVIDENCE_DIGITS)


def _default_tolerance(values: list, prec: int):
    return mpmath.ldexp(max([abs(v) for v in values] + [mpmath.mpf(0)]), -prec // 2)


def _sequence_evidence(labels: list[str], values: list) -> list[EvidenceEntry]:
    out = []
    for i, (label, v) in enumerate(zip(labels, values)):
        diff = _fmt(v - values[i - 1]) if i else None
        out.append(EvidenceEntry(label=label, value=_fmt(v), difference=diff))
    return out


def _weakly_monotone(values: list, tol) -> bool:
    if any(v < -tol for v in values):
        return False
    return all(b - a >= -tol for a, b in zip(values, values[1:]))


def ek_certificate(q, tol=None, prec: int | None = None) -> Certificate:
    """Enestrom-Kakeya hypothesis on q over its support: coefficients >= 0 and nondecreasing.

    A pass implies every zero lies in |w| <= 1; the implication is cross-checked by root finding.
    """
    subject: dict = {}
    if isinstance(q, QDecomposition):
        lo, hi = q.support
        poly = q.q
        coeffs = list(poly.coefficients)
    elif isinstance(q, PeriodPolynomial):
        poly = q
        coeffs = list(q.coefficients)
        lo, hi = 0, len(coeffs) - 1
    else:
        poly = None
        coeffs = [mpmath.mpmathify(c) for c in q]
        lo, hi = 0, len(coeffs) - 1
    if poly is not None:
        subject = {"k": poly.weight, "m": poly.order, "form": poly.provenance}
        prec = prec or poly.precision_bits
    prec = prec or mp.prec
    with mp.workprec(prec + GUARD_BITS):
        support = coeffs[lo : hi + 1]
        scale = max([abs(c) for c in support] + [mpmath.mpf(0)])
        imag_tol = mpmath.ldexp(scale, -prec // 2)
        if any(abs(mpmath.im(c)) > imag_tol for c in support):
            raise DomainError("ek_certificate: coefficients are not real")
        values = [mpmath.re(c) for c in support]
        tol_mp = mpmath.mpf(tol) if tol is not None else _default_tolerance(values, prec)
        passed = _weakly_monotone(values, tol_mp)
        evidence = _sequence_evidence([f"w^{n}" for n in range(lo, hi + 1)], values)
    notes = [f"support n in [{lo}, {hi}]"]
    if any(c != 0 for c in support):
        inside, witness = unit_disk_check(support, 1e-10 if tol is None else max(float(tol), 1e-30), prec)
        notes.append(f"max |root| over support = {_fmt(witness)}")
        if passed and not inside:
            logger.error("ek_certificate: monotone coefficients but a root outside the unit disk (%s)", _fmt(witness))
            notes.append("inconsistent: monotone hypothesis holds but a root lies outside |w| <= 1")
    return Certificate(
        kind="enestrom-kakeya",
        subject=subject,
        evidence=evidence,
        verdict="pass" if passed else "fail",
        tolerance=float(tol_mp),
        notes=notes,
    )


def _grid(k: int, step: Fraction) -> list[Fraction]:
    if step <= 0:
        raise DomainError("grid step must be positive")
    out = []
    s = Fraction(k, 2)
    while s <= k - 2:
        out.append(s)
        s += step
    return out


def monotonicity_certificate(k: int, j_max: int, grid_step=Fraction(1, 4), prec: int = 256) -> Certificate:
    """Sample Psi_j and Z_j, j = 1..j_max, on [k/2, k-2]; pass iff values and consecutive differences are >= -tol."""
    if k % 4 or k < 8:
        raise DomainError(f"monotonicity_certificate: needs k = 0 mod 4 and k >= 8, got {k}")
    if j_max < 1:
        raise DomainError(f"monotonicity_certificate: j_max must be >= 1, got {j_max}")
    grid = _grid(k, Fraction(grid_step))
    evidence: list[EvidenceEntry] = []
    passed = True
    worst_tol = mpmath.mpf(0)
    with mp.workprec(prec + GUARD_BITS):
        points = [mpmath.mpf(s.numerator) / s.denominator for s in grid]
        for j in range(1, j_max + 1):
            for name, fn in (("Psi", psi_diff), ("Z", zeta_diff)):
                values = [fn(j, s, k, prec) for s in points]
                tol = _default_tolerance(values, prec)
                worst_tol = max(worst_tol, tol)
                passed = passed and _weakly_monotone(values, tol)
                evidence += _sequence_evidence([f"{name}_{j}({s})" for s in grid], values)
    notes = [
        f"grid [{k // 2}, {k - 2}] step {Fraction(grid_step)}, {len(grid)} points",
        "weak positivity and monotonicity within tolerance; odd j vanish at the left endpoint k/2",
        "monotonicity certified at sample points, not on the full interval",
    ]
    return Certificate(
        kind="monotonicity-lemma",
        subject={"k": k, "j_max": j_max},
        evidence=evidence,
        verdict="pass" if passed else "fail",
        tolerance=float(worst_tol),
        notes=notes,
    )


def coefficient_factor_certificate(k: int, prec: int = 256) -> Certificate:
    """a_n = zeta(2n+2) zeta(k-2n-2) for n = k/4-1 .. k/2-2; pass iff strictly increasing."""
    if k % 4 or k < 8:
        raise DomainError(f"coefficient_factor_certificate: needs k = 0 mod 4 and k >= 8, got {k}")
    ns = list(range(k // 4 - 1, k // 2 - 1))
    with mp.workprec(prec + GUARD_BITS):
        values = [zeta(2 * n + 2, prec) * zeta(k - 2 * n - 2, prec) for n in ns]
        passed = all(b > a for a, b in zip(values, values[1:])) and all(v > 0 for v in values)
        evidence = _sequence_evidence([f"a_{n}" for n in ns], values)
    return Certificate(
        kind="coefficient-factor",
        subject={"k": k},
        evidence=evidence,
        verdict="pass" if passed else "fail",
        tolerance=0.0,
        notes=["first entry is zeta(k/2)^2"],
    )

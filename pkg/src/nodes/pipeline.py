"""Verification nodes: table -> polynomial -> roots -> classification -> certificates -> verdict.

Each node reads the VerifyState it needs and returns only the keys it produces; timings and
certificates are merged by the state reducers.
"""

import logging
import time
from typing import Any

import mpmath
from mpmath import mp

from src.certify import coefficient_factor_certificate, ek_certificate, monotonicity_certificate
from src.config import GUARD_BITS
from src.errors import PeriodPolyError
from src.lvalues import critical_table
from src.periodpoly import full_polynomial, odd_part, q_decompose, tilde_odd_part
from src.roots import classify, find_roots
from src.scope import EK_CERTIFICATE, FACTOR_CERTIFICATE, MONOTONICITY_CERTIFICATE, scope_for
from src.state import Certificate, RootReport, VerificationReport

logger = logging.getLogger(__name__)

ROOT_DIGITS = 20


def _elapsed(start: float) -> float:
    return round(time.perf_counter() - start, 6)


def ClassifyScopeNode(state: dict[str, Any]) -> dict[str, Any]:
    """Pre-execution classification: statement checked, expected geometry, certificates."""
    scope = scope_for(state["spec"], state["part"], state["order"])
    logger.debug("scope %s %s m=%s: %s", state["spec"].label, state["part"], state["order"], scope)
    return {"scope": scope}


def BuildTableNode(state: dict[str, Any]) -> dict[str, Any]:
    start = time.perf_counter()
    spec = state["spec"]
    prec = state["precision_bits"]
    table = critical_table(spec.model_copy(update={"precision_bits": prec}), state["order"], prec, store=state.get("store"))
    return {"table": table, "timings": {"table": _elapsed(start)}}


def BuildPolynomialNode(state: dict[str, Any]) -> dict[str, Any]:
    start = time.perf_counter()
    part = state["part"]
    if part == "tilde-odd":
        poly = tilde_odd_part(state["spec"].weight, state["order"], state["precision_bits"])
    elif part == "odd":
        poly = odd_part(state["table"])
    else:
        poly = full_polynomial(state["table"])
    return {"polynomial": poly, "timings": {"polynomial": _elapsed(start)}}


def FindRootsNode(state: dict[str, Any]) -> dict[str, Any]:
    start = time.perf_counter()
    roots = find_roots(state["polynomial"], state["precision_bits"])
    logger.info("%s %s m=%s: %s roots", state["spec"].label, state["part"], state["order"], len(roots))
    return {"roots": roots, "timings": {"roots": _elapsed(start)}}


def ClassifyRootsNode(state: dict[str, Any]) -> dict[str, Any]:
    report = classify(
        state["roots"],
        state["tolerance"],
        factored_origin=state["scope"]["factored_origin"],
        prec=state["precision_bits"],
    )
    return {"root_report": report}


def _failed(kind, message: str, tol: float) -> Certificate:
    return Certificate(kind=kind, verdict="fail", tolerance=tol, notes=[f"not evaluated: {message}"])


def CertifyNode(state: dict[str, Any]) -> dict[str, Any]:
    """Certificates selected by the scope; an evaluation error becomes a failed certificate with a note."""
    start = time.perf_counter()
    spec = state["spec"]
    prec = state["precision_bits"]
    m = state["order"]
    out: list[Certificate] = []
    for kind in state["scope"]["certificates"]:
        try:
            if kind == EK_CERTIFICATE:
                out.append(ek_certificate(q_decompose(state["polynomial"]), prec=prec))
            elif kind == MONOTONICITY_CERTIFICATE:
                out.append(monotonicity_certificate(spec.weight, max(m, 1), prec=prec))
            elif kind == FACTOR_CERTIFICATE:
                out.append(coefficient_factor_certificate(spec.weight, prec=prec))
        except PeriodPolyError as e:
            logger.warning("%s: certificate %s not evaluated: %s", spec.label, kind, e.message)
            out.append(_failed(kind, e.message, state["tolerance"]))
    return {"certificates": out, "timings": {"certificates": _elapsed(start)}}


def _root_rows(report: RootReport, prec: int) -> list[dict[str, str]]:
    rows = []
    with mp.workprec(prec + GUARD_BITS):
        for r in report.roots:
            z = r.value
            rows.append(
                {
                    "re": mpmath.nstr(mpmath.re(z), ROOT_DIGITS),
                    "im": mpmath.nstr(mpmath.im(z), ROOT_DIGITS),
                    "modulus": mpmath.nstr(abs(z), ROOT_DIGITS),
                    "argument_degrees": mpmath.nstr(mpmath.degrees(mpmath.arg(z)), ROOT_DIGITS),
                    "error_radius": mpmath.nstr(r.radius, 5),
                    "classification": r.locus,
                }
            )
    return rows


def judge_roots(report: RootReport, scope: dict[str, Any], certificates: list[Certificate]) -> tuple[str, list[str]]:
    """(verdict, reasons). Violations require a root off every permitted locus beyond its error radius."""
    counts = report.counts
    reasons: list[str] = []
    violated = False
    if counts.get("unclassified"):
        violated = True
        reasons.append(f"{counts['unclassified']} root(s) off every permitted locus")
    if scope["geometry"] == "unimodular":
        stray = counts.get("quadruple", 0) + counts.get("origin", 0)
        if stray:
            violated = True
            reasons.append(f"{stray} root(s) off the unit circle where all are expected on it")
    elif counts.get("quadruple", 0) != 4:
        violated = True
        reasons.append(f"expected one real quadruple, found {counts.get('quadruple', 0) // 4}")
    ambiguous = counts.get("ambiguous", 0)
    if ambiguous:
        reasons.append(f"{ambiguous} root(s) within their error radius of a locus boundary")

    if violated and not scope["asserted"]:
        reasons.append("exploration scope: geometry is not asserted")
        return "inconclusive", reasons
    if violated:
        return "violated", reasons
    if ambiguous:
        return "inconclusive", reasons
    failed = [c.kind for c in certificates if c.verdict == "fail"]
    if failed and scope["certificates_binding"]:
        reasons.append(f"certificate(s) failed: {', '.join(failed)}")
        return "inconclusive", reasons
    if failed:
        reasons.append(f"certificate(s) failed without bearing on the roots: {', '.join(failed)}")
    return "holds", reasons


def VerdictNode(state: dict[str, Any]) -> dict[str, Any]:
    spec = state["spec"]
    report = state["root_report"]
    scope = state["scope"]
    certificates = state.get("certificates") or []
    verdict, reasons = judge_roots(report, scope, certificates)
    a = report.quadruple_a
    out = VerificationReport(
        form=spec.label,
        weight=spec.weight,
        kind=spec.kind,
        index=spec.index,
        part=state["part"],
        order=state["order"],
        precision_bits=state["precision_bits"],
        tolerance=state["tolerance"],
        degree=report.degree,
        counts=report.counts,
        quadruple_a=mpmath.nstr(a, ROOT_DIGITS) if a is not None else None,
        max_circle_deviation=(
            mpmath.nstr(report.max_circle_deviation, 5) if report.max_circle_deviation is not None else None
        ),
        clusters=report.clusters,
        expected_geometry=f"{scope['kind']}:{scope['geometry']}",
        verdict=verdict,
        reasons=reasons,
        certificates=certificates,
        roots=_root_rows(report, state["precision_bits"]),
        timings=dict(state.get("timings") or {}),
    )
    logger.info("%s %s m=%s: %s", spec.label, state["part"], state["order"], verdict)
    return {"report": out}

"""Unit tests for verdict rules and scan aggregation (fan-in of per-item reports)."""

from src.nodes.aggregator import aggregate_scan, quadruple_spread
from src.nodes.pipeline import judge_roots
from src.state import Certificate, RootReport, VerificationReport

CUSP_SCOPE = {"kind": "conjecture", "geometry": "unimodular-plus-quadruple", "asserted": True, "certificates_binding": False}
THEOREM_SCOPE = {"kind": "theorem", "geometry": "unimodular", "asserted": True, "certificates_binding": True}
EXPLORATION_SCOPE = {"kind": "exploration", "geometry": "unimodular", "asserted": False, "certificates_binding": False}


def _counts(**kw):
    base = {"on-circle": 0, "origin": 0, "quadruple": 0, "unclassified": 0, "ambiguous": 0}
    base.update({k.replace("_", "-"): v for k, v in kw.items()})
    return base


def _root_report(**kw) -> RootReport:
    return RootReport(degree=sum(kw.values()), tolerance=1e-10, counts=_counts(**kw))


def _report(form="12.cusp.0", weight=12, kind="cusp", index=0, part="odd", order=0, verdict="holds", a=None, reasons=()):
    return VerificationReport(
        form=form,
        weight=weight,
        kind=kind,
        index=index,
        part=part,
        order=order,
        precision_bits=128,
        tolerance=1e-10,
        verdict=verdict,
        quadruple_a=a,
        reasons=list(reasons),
    )


def _cert(verdict: str) -> Certificate:
    return Certificate(kind="enestrom-kakeya", verdict=verdict, tolerance=1e-30)


def test_cusp_odd_part_with_one_quadruple_holds():
    verdict, reasons = judge_roots(_root_report(on_circle=4, quadruple=4), CUSP_SCOPE, [])
    assert verdict == "holds" and reasons == []


def test_missing_quadruple_is_a_violation():
    verdict, reasons = judge_roots(_root_report(on_circle=8), CUSP_SCOPE, [])
    assert verdict == "violated"
    assert "expected one real quadruple" in reasons[0]


def test_unclassified_root_violates_theorem_scope():
    verdict, _ = judge_roots(_root_report(on_circle=7, unclassified=1), THEOREM_SCOPE, [_cert("pass")])
    assert verdict == "violated"


def test_exploration_downgrades_violation():
    verdict, reasons = judge_roots(_root_report(on_circle=7, unclassified=1), EXPLORATION_SCOPE, [])
    assert verdict == "inconclusive"
    assert reasons[-1].startswith("exploration scope")


def test_ambiguous_root_is_inconclusive():
    verdict, _ = judge_roots(_root_report(on_circle=7, ambiguous=1), THEOREM_SCOPE, [])
    assert verdict == "inconclusive"


def test_failed_certificate_binds_only_in_theorem_scope():
    verdict, reasons = judge_roots(_root_report(on_circle=8), THEOREM_SCOPE, [_cert("fail")])
    assert verdict == "inconclusive" and "enestrom-kakeya" in reasons[-1]
    verdict, reasons = judge_roots(_root_report(on_circle=4, quadruple=4), CUSP_SCOPE, [_cert("fail")])
    assert verdict == "holds" and "without bearing on the roots" in reasons[-1]


def test_aggregate_counts_and_violations():
    reports = [
        _report(order=1),
        _report(form="E12", kind="eisenstein", verdict="violated", reasons=["1 root(s) off every permitted locus"]),
        _report(order=0),
    ]
    summary = aggregate_scan(reports, failures=["16.cusp.0 odd m=2: residual"])
    assert summary.verdicts == {"holds": 2, "violated": 1}
    assert summary.violations == ["E12 odd m=0: 1 root(s) off every permitted locus"]
    assert summary.failures == ["16.cusp.0 odd m=2: residual"]
    assert [r.order for r in summary.reports if r.kind == "cusp"] == [0, 1]
    assert summary.verdict == "violated"


def test_aggregate_empty():
    summary = aggregate_scan([])
    assert summary.reports == [] and summary.verdicts == {}
    assert summary.verdict == "holds"


def test_quadruple_spread_needs_two_eigenforms():
    reports = [
        _report(form="24.cusp.0", weight=24, index=0, order=1, a="1.5"),
        _report(form="24.cusp.1", weight=24, index=1, order=1, a="1.75"),
        _report(form="12.cusp.0", weight=12, order=1, a="2.0"),
    ]
    spread = quadruple_spread(reports)
    assert list(spread) == ["24:1"]
    assert float(spread["24:1"]) == 0.25

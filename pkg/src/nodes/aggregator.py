"""Scan aggregation: fan-in of per-item verification reports into one ScanSummary."""

from collections import defaultdict

import mpmath
from mpmath import mp

from src.state import ScanSummary, VerificationReport

SPREAD_BITS = 128


def _item_name(r: VerificationReport) -> str:
    return f"{r.form} {r.part} m={r.order}"


def quadruple_spread(reports: list[VerificationReport]) -> dict[str, str]:
    """Per 'k:m', max minus min of the quadruple parameter a across cusp eigenforms (needs two or more)."""
    by_key: dict[str, list] = defaultdict(list)
    with mp.workprec(SPREAD_BITS):
        for r in reports:
            if r.kind == "cusp" and r.part == "odd" and r.quadruple_a is not None:
                by_key[f"{r.weight}:{r.order}"].append(mpmath.mpf(r.quadruple_a))
        return {key: mpmath.nstr(max(v) - min(v), 5) for key, v in sorted(by_key.items()) if len(v) > 1}


def aggregate_scan(reports: list[VerificationReport], failures: list[str] | None = None) -> ScanSummary:
    """Count verdicts, list violations, and carry failed items without aborting the scan."""
    reports = sorted(reports, key=lambda r: (r.weight, r.kind, r.index, r.part, r.order))
    verdicts: dict[str, int] = {}
    violations = []
    for r in reports:
        verdicts[r.verdict] = verdicts.get(r.verdict, 0) + 1
        if r.verdict == "violated":
            violations.append(f"{_item_name(r)}: {'; '.join(r.reasons)}")
    return ScanSummary(
        reports=reports,
        verdicts=verdicts,
        violations=violations,
        failures=sorted(failures or []),
        quadruple_spread=quadruple_spread(reports),
    )

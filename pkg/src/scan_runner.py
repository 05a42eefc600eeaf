"""Scan runner: verification of many (form, part, m) items on a bounded process pool.

mpmath's precision context is process-global, so each work item runs in its own worker process;
jobs=1 runs inline. A failing item is logged and recorded, never aborts the scan.
"""

import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Any

from src.cache import ValueCache
from src.config import RunConfig
from src.errors import PeriodPolyError
from src.graph import run_verification
from src.nodes.aggregator import aggregate_scan
from src.state import FormSpec, ScanSummary, VerificationReport, dim_cusp_forms

logger = logging.getLogger(__name__)


def work_items(
    weights: list[int], orders: list[int], part: str, include_cusp: bool = True, include_eisenstein: bool = False
) -> list[tuple[FormSpec, str, int]]:
    """All eigenforms (and optionally E_k) of the given weights, crossed with the derivative orders."""
    items = []
    for k in sorted(set(weights)):
        if k < 4 or k % 2:
            continue
        specs = []
        if include_eisenstein or part == "tilde-odd":
            specs.append(FormSpec(weight=k, kind="eisenstein"))
        if include_cusp and part != "tilde-odd":
            specs += [FormSpec(weight=k, kind="cusp", index=i) for i in range(dim_cusp_forms(k))]
        for spec in specs:
            for m in sorted(set(orders)):
                items.append((spec, part, m))
    return items


def _store_for(config: RunConfig):
    if config.cache_dir is None:
        return None
    return ValueCache(config.cache_dir)


def run_item(spec: FormSpec, part: str, m: int, config: RunConfig) -> VerificationReport:
    return run_verification(spec, part, m, config, store=_store_for(config))


def _run_payload(payload: dict[str, Any]) -> dict[str, Any]:
    """Worker entry point: plain dicts in and out so items pickle cheaply."""
    spec = FormSpec(**payload["spec"])
    config = RunConfig(**payload["config"])
    return run_item(spec, payload["part"], payload["order"], config).model_dump()


def _label(spec: FormSpec, part: str, m: int) -> str:
    return f"{spec.label} {part} m={m}"


def run_scan(items: list[tuple[FormSpec, str, int]], config: RunConfig) -> ScanSummary:
    reports: list[VerificationReport] = []
    failures: list[str] = []
    if config.jobs <= 1:
        for spec, part, m in items:
            try:
                reports.append(run_item(spec, part, m, config))
            except PeriodPolyError as e:
                logger.warning("scan item %s failed: %s", _label(spec, part, m), e.message)
                failures.append(f"{_label(spec, part, m)}: {e.message}")
        return aggregate_scan(reports, failures)

    with ProcessPoolExecutor(max_workers=config.jobs) as pool:
        futures = {
            pool.submit(
                _run_payload,
                {"spec": spec.model_dump(), "part": part, "order": m, "config": config.model_dump()},
            ): _label(spec, part, m)
            for spec, part, m in items
        }
        for fut in as_completed(futures):
            label = futures[fut]
            try:
                reports.append(VerificationReport(**fut.result()))
            except PeriodPolyError as e:
                logger.warning("scan item %s failed: %s", label, e.message)
                failures.append(f"{label}: {e.message}")
            except Exception as e:
                logger.exception("scan item %s crashed", label)
                failures.append(f"{label}: {type(e).__name__}: {e}")
    return aggregate_scan(reports, failures)

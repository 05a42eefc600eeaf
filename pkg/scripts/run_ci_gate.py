#!/usr/bin/env python3
"""Desk-scale CI gate: every level-1 eigenform with weight <= 30, m <= 2, full polynomial.

Any violated verdict is a red build (exit 2); failed items are exit 1.
"""

import argparse
import json
import logging
import sys

from dotenv import load_dotenv

load_dotenv()


def main() -> int:
    parser = argparse.ArgumentParser(description="Run the CI subset of the period-polynomial scan.")
    parser.add_argument("--max-weight", type=int, default=30)
    parser.add_argument("--max-order", type=int, default=2)
    parser.add_argument("--part", choices=("full", "odd"), default="full")
    parser.add_argument("--jobs", type=int, default=None)
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    from src.config import RunConfig
    from src.scan_runner import run_scan, work_items

    config = RunConfig.from_env(jobs=args.jobs)
    items = work_items(list(range(12, args.max_weight + 1, 2)), list(range(args.max_order + 1)), args.part)
    summary = run_scan(items, config)
    print(
        json.dumps(
            {
                "verdict": summary.verdict,
                "verdicts": summary.verdicts,
                "violations": summary.violations,
                "failures": summary.failures,
                "quadruple_spread": summary.quadruple_spread,
            },
            indent=2,
            sort_keys=True,
        )
    )
    if summary.violations:
        return 2
    return 1 if summary.failures or summary.verdict != "holds" else 0


if __name__ == "__main__":
    sys.exit(main())

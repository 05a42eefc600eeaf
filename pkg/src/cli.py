"""Command-line entry point: coeffs, lvalues, poly, verify, scan, certify, cocycle-check, cache.

Output is JSON (schema-versioned, sorted keys, byte-identical across runs) or CSV. Exit codes:
0 success / holds, 1 operational error or inconclusive, 2 mathematical violation.
"""

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

import mpmath
from dotenv import load_dotenv
from mpmath import mp

from src.cache import ValueCache
from src.certify import coefficient_factor_certificate, ek_certificate, monotonicity_certificate
from src.cocycle import value_formula_residuals
from src.config import SCHEMA_VERSION, RunConfig, __version__
from src.errors import (
    EXIT_OK,
    EXIT_OPERATIONAL,
    EXIT_VIOLATION,
    DomainError,
    exit_code_for_exception,
    user_message_for_exception,
)
from src.forms import form_coefficients
from src.graph import run_verification
from src.lvalues import critical_table
from src.periodpoly import full_polynomial, functional_symmetry, odd_part, q_decompose, tilde_odd_part
from src.scan_runner import run_scan, work_items
from src.state import FormSpec

logger = logging.getLogger(__name__)

ROOT_CSV_HEADER = ("re", "im", "modulus", "argument-degrees", "error-radius", "classification")
ROOT_FIELDS = ("re", "im", "modulus", "argument_degrees", "error_radius", "classification")
DEFAULT_Z_SAMPLES = ("0 2", "1 2", "-1 3")
DEFAULT_COCYCLE_THRESHOLD = 1e-12
VERDICT_EXIT = {"holds": EXIT_OK, "violated": EXIT_VIOLATION, "inconclusive": EXIT_OPERATIONAL}


def _digits(prec: int) -> int:
    return max(15, int(prec * 0.30103))


def _fmt(x, prec: int) -> str:
    return mpmath.nstr(x, _digits(prec))


def _fmt_complex(z, prec: int) -> dict[str, str]:
    z = mpmath.mpc(z)
    return {"re": _fmt(z.real, prec), "im": _fmt(z.imag, prec)}


def _int_range(text: str) -> list[int]:
    """'12-26', '8,12,16' or '8-40:4' (step) into a list of integers."""
    out: list[int] = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        step = 1
        if ":" in chunk:
            chunk, step_text = chunk.split(":")
            step = int(step_text)
        if "-" in chunk:
            lo, hi = chunk.split("-", 1)
            out += list(range(int(lo), int(hi) + 1, step))
        else:
            out.append(int(chunk))
    return out


def _spec(args: argparse.Namespace, config: RunConfig) -> FormSpec:
    try:
        return FormSpec(weight=args.weight, kind=args.kind, index=args.index, precision_bits=config.precision_bits)
    except ValueError as e:
        raise DomainError(f"invalid form: {e}") from e


def _store(config: RunConfig, args: argparse.Namespace):
    if args.no_cache or config.cache_dir is None:
        return None
    return ValueCache(config.cache_dir)


def cmd_coeffs(args, config) -> tuple[dict, list | None, int]:
    spec = _spec(args, config)
    f = form_coefficients(spec)
    if args.count + 1 > len(f.coeffs):
        raise DomainError(f"only {len(f.coeffs)} coefficients available at this precision")
    values = [_fmt(c, config.precision_bits) for c in f.coeffs[: args.count + 1]]
    rows = [[str(n), v] for n, v in enumerate(values)]
    return {"form": spec.label, "coefficients": values}, [("n", "a_n"), *rows], EXIT_OK


def cmd_lvalues(args, config) -> tuple[dict, list | None, int]:
    spec = _spec(args, config)
    table = critical_table(spec, args.deriv, config.precision_bits, store=_store(config, args))
    p = config.precision_bits
    entries = [
        {"s": s, **_fmt_complex(table.value(s), p), "route": table.routes[s - 1], "error": mpmath.nstr(table.errors[s - 1], 5)}
        for s in range(1, spec.weight)
    ]
    rows = [("s", "re", "im", "route", "error")] + [[str(e["s"]), e["re"], e["im"], e["route"], e["error"]] for e in entries]
    payload = {
        "form": spec.label,
        "order": args.deriv,
        "values": entries,
        "functional_equation_residual": mpmath.nstr(table.fe_residual, 5),
    }
    return payload, rows, EXIT_OK


def cmd_poly(args, config) -> tuple[dict, list | None, int]:
    p = config.precision_bits
    if args.part == "tilde-odd":
        poly = tilde_odd_part(args.weight, args.deriv, p)
        label = f"E{args.weight}"
    else:
        spec = _spec(args, config)
        table = critical_table(spec, args.deriv, p, store=_store(config, args))
        poly = full_polynomial(table) if args.part == "full" else odd_part(table)
        label = spec.label
    payload: dict[str, Any] = {
        "form": label,
        "order": args.deriv,
        "part": args.part,
        "coefficients": [_fmt_complex(c, p) for c in poly.coefficients],
    }
    if poly.kind == "full":
        payload["symmetry"] = functional_symmetry(poly)
    elif poly.weight % 4 == 0:
        dec = q_decompose(poly)
        payload["q"] = {
            "epsilon": dec.epsilon,
            "support": list(dec.support),
            "variable": dec.variable,
            "coefficients": [_fmt(mpmath.re(c), p) for c in dec.q.coefficients],
        }
    rows = [("degree", "re", "im")] + [
        [str(i), c["re"], c["im"]] for i, c in enumerate(payload["coefficients"])
    ]
    return payload, rows, EXIT_OK


def _report_payload(report, timings: bool) -> dict:
    data = report.model_dump()
    if not timings:
        data.pop("timings", None)
    return data


def _root_rows(report) -> list:
    return [ROOT_CSV_HEADER] + [[row[f] for f in ROOT_FIELDS] for row in report.roots]


def cmd_verify(args, config) -> tuple[dict, list | None, int]:
    if args.part == "tilde-odd":
        args.kind = "eisenstein"
    spec = _spec(args, config)
    report = run_verification(spec, args.part, args.deriv, config, store=_store(config, args))
    return _report_payload(report, args.timings), _root_rows(report), VERDICT_EXIT[report.verdict]


def cmd_scan(args, config) -> tuple[dict, list | None, int]:
    items = work_items(
        _int_range(args.weights),
        _int_range(args.orders),
        args.part,
        include_cusp=not args.no_cusp,
        include_eisenstein=args.eisenstein,
    )
    if args.no_cache:
        config = config.model_copy(update={"cache_dir": None})
    summary = run_scan(items, config)
    data = summary.model_dump()
    data["verdict"] = summary.verdict
    data["reports"] = [_report_payload(r, args.timings) for r in summary.reports]
    rows = [("form", "part", "m", "verdict", "quadruple_a", "max_circle_deviation")] + [
        [r.form, r.part, str(r.order), r.verdict, r.quadruple_a or "", r.max_circle_deviation or ""]
        for r in summary.reports
    ]
    code = VERDICT_EXIT[summary.verdict] if items else EXIT_OK
    return data, rows, code


def cmd_certify(args, config) -> tuple[dict, list | None, int]:
    p = config.precision_bits
    if args.certificate == "ek":
        if args.part == "tilde-odd":
            poly = tilde_odd_part(args.weight, args.deriv, p)
        else:
            poly = odd_part(critical_table(_spec(args, config), args.deriv, p, store=_store(config, args)))
        cert = ek_certificate(q_decompose(poly), prec=p)
    elif args.certificate == "monotonicity":
        cert = monotonicity_certificate(args.weight, args.j_max, Fraction(args.grid_step), prec=p)
    else:
        cert = coefficient_factor_certificate(args.weight, prec=p)
    rows = [("label", "value", "difference")] + [[e.label, e.value, e.difference or ""] for e in cert.evidence]
    return cert.model_dump(), rows, EXIT_OK if cert.verdict == "pass" else EXIT_OPERATIONAL


def _parse_point(text: str):
    parts = text.replace(",", " ").split()
    if len(parts) != 2:
        raise DomainError(f"z sample must be 're im', got {text!r}")
    return mpmath.mpc(parts[0], parts[1])


def cmd_cocycle_check(args, config) -> tuple[dict, list | None, int]:
    spec = _spec(args, config)
    p = config.precision_bits
    with mp.workprec(p):
        samples = [_parse_point(z) for z in (args.z or DEFAULT_Z_SAMPLES)]
    rows_out = value_formula_residuals(spec, args.deriv, samples, p)
    worst = max(r["residual"] for r in rows_out)
    payload = {
        "form": spec.label,
        "order": args.deriv,
        "threshold": args.threshold,
        "max_residual": mpmath.nstr(worst, 5),
        "samples": [
            {
                "z": _fmt_complex(r["z"], 64),
                "sigma": _fmt_complex(r["sigma"], p),
                "formula": _fmt_complex(r["formula"], p),
                "residual": mpmath.nstr(r["residual"], 5),
            }
            for r in rows_out
        ],
    }
    rows = [("z_re", "z_im", "residual")] + [
        [s["z"]["re"], s["z"]["im"], s["residual"]] for s in payload["samples"]
    ]
    if worst > args.threshold:
        logger.error("cocycle check %s m=%s: residual %s above %s", spec.label, args.deriv, payload["max_residual"], args.threshold)
        return payload, rows, EXIT_VIOLATION
    return payload, rows, EXIT_OK


def cmd_cache(args, config) -> tuple[dict, list | None, int]:
    if config.cache_dir is None:
        raise DomainError("no cache directory configured")
    store = ValueCache(config.cache_dir)
    data = store.gc() if args.action == "gc" else store.stat()
    return data, [tuple(data), [str(v) for v in data.values()]], EXIT_OK


def _add_form_args(p: argparse.ArgumentParser, deriv: bool = True) -> None:
    p.add_argument("--weight", type=int, required=True)
    p.add_argument("--kind", choices=("cusp", "eisenstein"), default="cusp")
    p.add_argument("--index", type=int, default=0, help="eigenform index, ordered by a_2 descending")
    if deriv:
        p.add_argument("--deriv", type=int, default=0, help="derivative order m")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-bits", type=int, default=None)
    common.add_argument("--tolerance", type=float, default=None)
    common.add_argument("--cache-dir", type=Path, default=None)
    common.add_argument("--no-cache", action="store_true", help="do not read or write the persistent cache")
    common.add_argument("--jobs", type=int, default=None)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", type=Path, default=None)
    common.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte-identical output)")
    common.add_argument("--verbose", "-v", action="store_true")

    parser = argparse.ArgumentParser(prog="ppoly", description="Zeros of period polynomials of L-derivatives.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", parents=[common], help="q-expansion coefficients")
    _add_form_args(p, deriv=False)
    p.add_argument("--count", type=int, default=10)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("lvalues", parents=[common], help="Lambda^(m)(s) for s = 1..k-1")
    _add_form_args(p)
    p.set_defaults(func=cmd_lvalues)

    p = sub.add_parser("poly", parents=[common], help="period polynomial coefficients")
    _add_form_args(p)
    p.add_argument("--part", choices=("full", "odd", "tilde-odd"), default="full")
    p.set_defaults(func=cmd_poly)

    p = sub.add_parser("verify", parents=[common], help="roots, classification, certificates and verdict")
    _add_form_args(p)
    p.add_argument("--part", choices=("full", "odd", "tilde-odd"), default="full")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", parents=[common], help="verify every eigenform in a weight range")
    p.add_argument("--weights", default="12-26", help="e.g. 12-26, 8-40:4 or 12,16,20")
    p.add_argument("--orders", default="0-1")
    p.add_argument("--part", choices=("full", "odd", "tilde-odd"), default="full")
    p.add_argument("--eisenstein", action="store_true", help="include E_k")
    p.add_argument("--no-cusp", action="store_true", help="skip cusp eigenforms")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("certify", parents=[common], help="Enestrom-Kakeya, monotonicity or coefficient-factor certificate")
    _add_form_args(p)
    p.add_argument("--certificate", choices=("ek", "monotonicity", "factor"), default="ek")
    p.add_argument("--part", choices=("odd", "tilde-odd"), default="odd")
    p.add_argument("--j-max", type=int, default=3)
    p.add_argument("--grid-step", default="1/4")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("cocycle-check", parents=[common], help="compare sigma_f(S,...,S) with the polynomial formula")
    _add_form_args(p)
    p.add_argument("--z", action="append", help="sample point 're im' (repeatable)")
    p.add_argument("--threshold", type=float, default=DEFAULT_COCYCLE_THRESHOLD)
    p.set_defaults(func=cmd_cocycle_check)

    p = sub.add_parser("cache", parents=[common], help="persistent L-value cache maintenance")
    p.add_argument("action", choices=("gc", "stat"))
    p.set_defaults(func=cmd_cache)
    return parser


def render(payload: dict, rows: list | None, fmt: str) -> str:
    if fmt == "csv" and rows is not None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in rows:
            writer.writerow(row)
        return buf.getvalue()
    doc = {"schema": SCHEMA_VERSION, "version": __version__, **payload}
    return json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = RunConfig.from_env(
            precision_bits=args.precision_bits,
            tolerance=args.tolerance,
            cache_dir=args.cache_dir,
            jobs=args.jobs,
        )
    except ValueError as e:
        print(f"invalid configuration: {e}", file=sys.stderr)
        return EXIT_OPERATIONAL
    try:
        payload, rows, code = args.func(args, config)
    except Exception as e:
        message = user_message_for_exception(e)
        if message is None:
            logger.exception("unexpected failure in %s", args.command)
            message = f"{type(e).__name__}: {e}"
        print(message, file=sys.stderr)
        return exit_code_for_exception(e)
    text = render(payload, rows, args.format)
    if args.output:
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

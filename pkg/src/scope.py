"""Verification scope: which statement a (form, part, m) request checks, and with which certificates.

Runs before any numerics so the graph only builds certificates that apply to the request.
"""

from typing import Any, Literal

from src.errors import DomainError
from src.state import CertificateKind, FormSpec

ScopeKind = Literal["theorem", "conjecture", "exploration"]
Geometry = Literal["unimodular", "unimodular-plus-quadruple"]

EK_CERTIFICATE: CertificateKind = "enestrom-kakeya"
MONOTONICITY_CERTIFICATE: CertificateKind = "monotonicity-lemma"
FACTOR_CERTIFICATE: CertificateKind = "coefficient-factor"


def classify_scope(spec: FormSpec, part: str, m: int) -> ScopeKind:
    """theorem: proven Eisenstein cases; conjecture: eigenforms; exploration: everything else."""
    if m < 0:
        raise DomainError(f"derivative order must be >= 0, got {m}")
    if part not in ("full", "odd", "tilde-odd"):
        raise DomainError(f"unknown polynomial part {part!r}")
    if part == "tilde-odd" and spec.kind != "eisenstein":
        raise DomainError("tilde-odd parts exist only for Eisenstein series")
    if spec.kind == "cusp":
        return "conjecture"
    if spec.weight % 4 or spec.weight < 8 or m == 0 or part == "full":
        return "exploration"
    if part == "tilde-odd" or m == 1:
        return "theorem"
    return "conjecture"


def expected_geometry(spec: FormSpec, part: str) -> Geometry:
    """Cusp odd parts keep the trivial quadruple +-a, +-1/a; every other part is expected on |z| = 1."""
    if spec.kind == "cusp" and part == "odd":
        return "unimodular-plus-quadruple"
    return "unimodular"


def certificates_for(spec: FormSpec, part: str, m: int) -> list[CertificateKind]:
    """Certificates that apply; the Enestrom-Kakeya test needs a self-reciprocal odd part (k = 0 mod 4)."""
    if part == "full" or spec.weight % 4:
        return []
    if spec.kind == "cusp":
        # recorded only: oscillating cusp coefficients make this fail while the roots still behave
        return [EK_CERTIFICATE] if m >= 1 else []
    if m == 0:
        return []
    if part == "tilde-odd":
        return [EK_CERTIFICATE, MONOTONICITY_CERTIFICATE, FACTOR_CERTIFICATE]
    return [EK_CERTIFICATE]


def scope_for(spec: FormSpec, part: str, m: int) -> dict[str, Any]:
    """Scope record stored in the graph state and copied into the report."""
    kind = classify_scope(spec, part, m)
    return {
        "kind": kind,
        "geometry": expected_geometry(spec, part),
        "certificates": certificates_for(spec, part, m),
        "asserted": kind != "exploration",
        "certificates_binding": kind == "theorem",
        "factored_origin": 0 if part == "full" else 1,
    }

"""Domain models shared by the numerical modules and the verification graph."""

import hashlib
import operator
from typing import Annotated, Any, Literal, Optional, TypedDict

import mpmath
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.config import DEFAULT_PRECISION_BITS, GUARD_BITS

FormKind = Literal["eisenstein", "cusp"]
PolyKind = Literal["full", "odd", "tilde-odd", "q-part"]
Route = Literal["mellin", "closed-form"]
RootLocus = Literal["on-circle", "origin", "quadruple", "unclassified", "ambiguous"]
Verdict = Literal["holds", "violated", "inconclusive"]
CertificateKind = Literal["enestrom-kakeya", "monotonicity-lemma", "coefficient-factor"]


def dim_modular_forms(k: int) -> int:
    """dim M_k for level 1 and even k >= 4."""
    return k // 12 + (0 if k % 12 == 2 else 1)


def dim_cusp_forms(k: int) -> int:
    return max(dim_modular_forms(k) - 1, 0)


class FormSpec(BaseModel):
    """Identity of a level-1 form: weight, kind and (for cusp forms) the eigenform index."""

    model_config = ConfigDict(frozen=True)

    weight: int
    kind: FormKind
    index: int = Field(default=0, ge=0)
    precision_bits: int = Field(default=DEFAULT_PRECISION_BITS, ge=64)
    truncation: Optional[int] = Field(default=None, ge=8)

    @model_validator(mode="after")
    def _check_weight(self) -> "FormSpec":
        k = self.weight
        if k < 4 or k % 2:
            raise ValueError(f"weight must be even and >= 4, got {k}")
        if self.kind == "eisenstein" and self.index:
            raise ValueError("Eisenstein series have no eigenform index")
        if self.kind == "cusp":
            d = dim_cusp_forms(k)
            if d == 0:
                raise ValueError(f"no cusp forms of weight {k}")
            if self.index >= d:
                raise ValueError(f"eigenform index {self.index} out of range for dim S_{k} = {d}")
        return self

    @property
    def label(self) -> str:
        if self.kind == "eisenstein":
            return f"E{self.weight}"
        return f"{self.weight}.cusp.{self.index}"

    @property
    def digest(self) -> str:
        """Stable form id used as cache key (independent of precision)."""
        return hashlib.sha256(f"level1:{self.kind}:{self.weight}:{self.index}".encode()).hexdigest()[:16]


class FourierCoefficients(BaseModel):
    """a_0..a_N of a q-expansion as high-precision reals."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    spec: FormSpec
    coeffs: list[Any]
    eigenvalue_t2: Any = None

    @property
    def weight(self) -> int:
        return self.spec.weight

    @property
    def a0(self):
        return self.coeffs[0]

    @property
    def truncation(self) -> int:
        return len(self.coeffs) - 1


class LDerivativeTable(BaseModel):
    """Lambda^(m)(s) at s = 1..k-1 with per-entry error estimates and routes."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    spec: FormSpec
    order: int = Field(ge=0)
    precision_bits: int
    values: list[Any]
    errors: list[Any]
    routes: list[Route]
    fe_residual: Any = None

    def value(self, s: int):
        """Entry at integer s in [1, k-1]."""
        return self.values[s - 1]

    @property
    def digest(self) -> str:
        return f"{self.spec.digest}:m{self.order}:P{self.precision_bits}"


class PeriodPolynomial(BaseModel):
    """Polynomial in z with complex coefficients stored ascending (coefficients[i] multiplies z^i)."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    kind: PolyKind
    weight: int
    order: int
    coefficients: list[Any]
    provenance: str = ""
    precision_bits: int = DEFAULT_PRECISION_BITS

    @property
    def degree(self) -> int:
        for i in range(len(self.coefficients) - 1, -1, -1):
            if self.coefficients[i] != 0:
                return i
        return -1

    def evaluate(self, z):
        with mpmath.mp.workprec(self.precision_bits + GUARD_BITS):
            acc = mpmath.mpc(0)
            for c in reversed(self.coefficients):
                acc = acc * z + c
            return acc


class GroupElement(BaseModel):
    """Element of SL_2(Z) acting on the upper half-plane by Moebius transformations."""

    model_config = ConfigDict(frozen=True)

    a: int
    b: int
    c: int
    d: int

    @model_validator(mode="after")
    def _check_det(self) -> "GroupElement":
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError("determinant must be 1")
        return self

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            a=self.a * other.a + self.b * other.c,
            b=self.a * other.b + self.b * other.d,
            c=self.c * other.a + self.d * other.c,
            d=self.c * other.b + self.d * other.d,
        )

    def act(self, tau):
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    def j(self, tau):
        """Automorphy factor c*tau + d."""
        return self.c * tau + self.d

    @property
    def is_scalar(self) -> bool:
        """True for +-I, which act trivially on the upper half-plane."""
        return self.b == 0 and self.c == 0 and self.a == self.d

    @property
    def name(self) -> str:
        for label, g in (("I", IDENTITY), ("S", S), ("T", T), ("-I", NEG_I)):
            if self == g:
                return label
        return f"[{self.a},{self.b};{self.c},{self.d}]"


S = GroupElement(a=0, b=-1, c=1, d=0)
T = GroupElement(a=1, b=1, c=0, d=1)
IDENTITY = GroupElement(a=1, b=0, c=0, d=1)
NEG_I = GroupElement(a=-1, b=0, c=0, d=-1)


class LocatedRoot(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    value: Any
    radius: Any
    locus: RootLocus = "unclassified"


class RootReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    degree: int
    tolerance: float
    roots: list[LocatedRoot] = Field(default_factory=list)
    counts: dict[str, int] = Field(default_factory=dict)
    quadruples: list[Any] = Field(default_factory=list, description="Real parameters a > 1 of matched quadruples")
    clusters: list[list[int]] = Field(default_factory=list)
    max_circle_deviation: Any = None
    factored_origin: int = Field(default=0, description="Trivial zero at z=0 divided out before root finding")

    @property
    def quadruple_a(self):
        return self.quadruples[0] if self.quadruples else None


class EvidenceEntry(BaseModel):
    label: str
    value: str
    difference: Optional[str] = None


class Certificate(BaseModel):
    kind: CertificateKind
    subject: dict[str, Any] = Field(default_factory=dict)
    evidence: list[EvidenceEntry] = Field(default_factory=list)
    verdict: Literal["pass", "fail"]
    tolerance: float
    notes: list[str] = Field(default_factory=list)


class VerificationReport(BaseModel):
    form: str
    weight: int
    kind: FormKind
    index: int = 0
    part: Literal["full", "odd", "tilde-odd"]
    order: int
    precision_bits: int
    tolerance: float
    degree: int = 0
    counts: dict[str, int] = Field(default_factory=dict)
    quadruple_a: Optional[str] = None
    max_circle_deviation: Optional[str] = None
    clusters: list[list[int]] = Field(default_factory=list)
    expected_geometry: str = ""
    verdict: Verdict = "inconclusive"
    reasons: list[str] = Field(default_factory=list)
    certificates: list[Certificate] = Field(default_factory=list)
    roots: list[dict[str, str]] = Field(default_factory=list)
    timings: dict[str, float] = Field(default_factory=dict)
    error: Optional[str] = None


class ScanSummary(BaseModel):
    reports: list[VerificationReport] = Field(default_factory=list)
    verdicts: dict[str, int] = Field(default_factory=dict)
    violations: list[str] = Field(default_factory=list)
    failures: list[str] = Field(default_factory=list)
    quadruple_spread: dict[str, str] = Field(
        default_factory=dict,
        description="Per 'k:m', max minus min of the quadruple parameter across eigenforms of that weight",
    )

    @property
    def verdict(self) -> Verdict:
        if self.violations:
            return "violated"
        if self.failures or self.verdicts.get("inconclusive"):
            return "inconclusive"
        return "holds"


class VerifyState(TypedDict, total=False):
    """Verification graph state. certificates and timings use reducers so nodes append instead of overwriting."""
    spec: FormSpec
    part: Literal["full", "odd", "tilde-odd"]
    order: int
    precision_bits: int
    tolerance: float
    scope: dict[str, Any]
    store: Any
    table: Optional[LDerivativeTable]
    polynomial: PeriodPolynomial
    roots: list[LocatedRoot]
    root_report: RootReport
    certificates: Annotated[list[Certificate], operator.add]
    timings: Annotated[dict[str, float], operator.ior]
    report: VerificationReport


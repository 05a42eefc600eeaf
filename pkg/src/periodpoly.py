"""Period polynomials of L-derivative tables, the weight 2-k slash action and the self-inversive
reduction of odd parts.

All polynomials are coefficient lists in ascending degree. Binomials and powers of i are applied
exactly to table entries.
"""

import logging
from math import comb

import mpmath
from mpmath import mp
from pydantic import BaseModel, ConfigDict

from src.config import GUARD_BITS
from src.errors import DomainError, ResidualError
from src.lvalues import lambda_tilde_deriv
from src.state import GroupElement, LDerivativeTable, PeriodPolynomial, S

logger = logging.getLogger(__name__)

_I_POWERS = (mpmath.mpc(1, 0), mpmath.mpc(0, 1), mpmath.mpc(-1, 0), mpmath.mpc(0, -1))


def i_power(e: int):
    """i^e for any integer e (exact)."""
    return _I_POWERS[e % 4]


def _check_table(table: LDerivativeTable) -> None:
    k = table.spec.weight
    if len(table.values) != k - 1 or any(v is None for v in table.values):
        raise DomainError(f"incomplete table for {table.spec.label}: need {k - 1} entries")


def full_polynomial(table: LDerivativeTable) -> PeriodPolynomial:
    """Q(z) = sum_{n=0}^{k-2} C(k-2,n) i^(1-n) Lambda^(m)(n+1) z^(k-2-n)."""
    _check_table(table)
    k = table.spec.weight
    coeffs = [mpmath.mpc(0)] * (k - 1)
    with mp.workprec(table.precision_bits + GUARD_BITS):
        for n in range(k - 1):
            coeffs[k - 2 - n] = comb(k - 2, n) * i_power(1 - n) * table.value(n + 1)
    return PeriodPolynomial(
        kind="full",
        weight=k,
        order=table.order,
        coefficients=coeffs,
        provenance=table.digest,
        precision_bits=table.precision_bits,
    )


def odd_part(table: LDerivativeTable) -> PeriodPolynomial:
    """sum over odd n in [1, k-3] of C(k-2,n) i^(1-n) Lambda^(m)(n+1) z^(k-3-n); the trivial factor z is removed."""
    _check_table(table)
    k = table.spec.weight
    coeffs = [mpmath.mpc(0)] * (k - 3)
    with mp.workprec(table.precision_bits + GUARD_BITS):
        for n in range(1, k - 2, 2):
            coeffs[k - 3 - n] = comb(k - 2, n) * i_power(1 - n) * table.value(n + 1)
    return PeriodPolynomial(
        kind="odd",
        weight=k,
        order=table.order,
        coefficients=coeffs,
        provenance=table.digest,
        precision_bits=table.precision_bits,
    )


def tilde_odd_part(k: int, m: int, prec: int) -> PeriodPolynomial:
    """Odd part built from Lambda~^(m) of E_k (the Eisenstein completion without cosine and kappa_k)."""
    if k < 8 or k % 2:
        raise DomainError(f"tilde_odd_part: needs even k >= 8, got {k}")
    if k % 4:
        logger.info("tilde_odd_part: weight %s is outside k = 0 mod 4, exploration only", k)
    coeffs = [mpmath.mpc(0)] * (k - 3)
    with mp.workprec(prec + GUARD_BITS):
        for n in range(1, k - 2, 2):
            coeffs[k - 3 - n] = comb(k - 2, n) * i_power(1 - n) * lambda_tilde_deriv(k, m, n + 1, prec)
    return PeriodPolynomial(
        kind="tilde-odd", weight=k, order=m, coefficients=coeffs, provenance=f"tilde:E{k}:m{m}:P{prec}", precision_bits=prec
    )


def _coeff_list(p) -> list:
    return list(p.coefficients) if isinstance(p, PeriodPolynomial) else list(p)


def _degree(coeffs: list) -> int:
    for i in range(len(coeffs) - 1, -1, -1):
        if coeffs[i] != 0:
            return i
    return -1


def _int_poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def slash(p, gamma: GroupElement, k: int, prec: int | None = None):
    """(p|_{2-k} gamma)(z) = p(gamma z) (cz+d)^(k-2), expanded with exact integer binomials.

    Accepts a coefficient list or a PeriodPolynomial and returns the same kind of object.
    """
    coeffs = _coeff_list(p)
    if _degree(coeffs) > k - 2:
        raise DomainError(f"slash: degree {_degree(coeffs)} exceeds k-2 = {k - 2}")
    if prec is None:
        prec = p.precision_bits if isinstance(p, PeriodPolynomial) else mp.prec
    coeffs = coeffs + [0] * (k - 1 - len(coeffs))
    num_pows = [[1]]
    den_pows = [[1]]
    for _ in range(k - 2):
        num_pows.append(_int_poly_mul(num_pows[-1], [gamma.b, gamma.a]))
        den_pows.append(_int_poly_mul(den_pows[-1], [gamma.d, gamma.c]))
    out = [mpmath.mpc(0)] * (k - 1)
    with mp.workprec(prec + GUARD_BITS):
        for n, c in enumerate(coeffs[: k - 1]):
            if c == 0:
                continue
            for i, b in enumerate(_int_poly_mul(num_pows[n], den_pows[k - 2 - n])):
                if b:
                    out[i] += b * c
    if isinstance(p, PeriodPolynomial):
        return p.model_copy(update={"coefficients": out})
    return out


def evaluate(coeffs: list, z, prec: int | None = None):
    with mp.workprec((prec or mp.prec) + GUARD_BITS):
        acc = mpmath.mpc(0)
        for c in reversed(coeffs):
            acc = acc * z + c
        return acc


def _scale(coeffs: list):
    return max([abs(c) for c in coeffs] + [mpmath.mpf(0)])


def _tolerance(tol, prec: int):
    return mpmath.mpf(tol) if tol is not None else mpmath.ldexp(1, -prec // 2)


def functional_symmetry(q: PeriodPolynomial, tol=None) -> int:
    """Sign sigma with Q|S = sigma Q; expected (-1)^(m+1)."""
    if q.kind != "full":
        raise DomainError(f"functional_symmetry: needs a full polynomial, got {q.kind}")
    image = slash(q.coefficients, S, q.weight, q.precision_bits)
    with mp.workprec(q.precision_bits + GUARD_BITS):
        scale = _scale(q.coefficients) or mpmath.mpf(1)
        tol = _tolerance(tol, q.precision_bits)
        plus = max(abs(a - b) for a, b in zip(image, q.coefficients)) / scale
        minus = max(abs(a + b) for a, b in zip(image, q.coefficients)) / scale
    if plus <= tol and plus <= minus:
        return 1
    if minus <= tol:
        return -1
    raise ResidualError(
        f"functional_symmetry: neither sign fits (residuals {mpmath.nstr(plus, 5)}, {mpmath.nstr(minus, 5)})",
        min(plus, minus),
    )


class QDecomposition(BaseModel):
    """Half polynomial q with R(w) = q(w) + epsilon w^D q(1/w); w = -1/z^2 (tilde) or 1/z^2 (plain)."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    q: PeriodPolynomial
    epsilon: int
    reduced: list
    support: tuple[int, int]
    variable: str
    residual: object = None

    def reconstruct(self) -> list:
        d = len(self.reduced) - 1
        q = self.q.coefficients
        with mp.workprec(self.q.precision_bits + GUARD_BITS):
            return [q[n] + self.epsilon * q[d - n] for n in range(d + 1)]


def even_reduction(p: PeriodPolynomial) -> tuple[list, str]:
    """R(w) whose unit-circle zeros are equivalent to those of the odd part.

    tilde-odd: O(z) = z^(k-4) R(-1/z^2), rho_n = (-1)^n [z^(k-4-2n)]O.
    odd:       O(z) = -z^(k-4) R(1/z^2),  rho_n = -[z^(k-4-2n)]O.
    """
    if p.kind not in ("odd", "tilde-odd"):
        raise DomainError(f"even_reduction: needs an odd or tilde-odd polynomial, got {p.kind}")
    k = p.weight
    d = k // 2 - 2
    c = list(p.coefficients) + [mpmath.mpc(0)] * max(0, k - 3 - len(p.coefficients))
    if p.kind == "tilde-odd":
        return [(-1) ** n * c[k - 4 - 2 * n] for n in range(d + 1)], "-1/z^2"
    return [-c[k - 4 - 2 * n] for n in range(d + 1)], "1/z^2"


def q_decompose(p: PeriodPolynomial, tol=None) -> QDecomposition:
    """Split the even reduction R into q supported on [k/4-1, k/2-2], the midpoint coefficient halved.

    epsilon is measured from the reciprocal symmetry of R (expected (-1)^m for k = 0 mod 4).
    """
    k = p.weight
    if k % 4:
        raise DomainError(f"q_decompose: needs k = 0 mod 4, got {k}")
    reduced, variable = even_reduction(p)
    d = len(reduced) - 1
    mid = d // 2
    with mp.workprec(p.precision_bits + GUARD_BITS):
        scale = _scale(reduced) or mpmath.mpf(1)
        tol = _tolerance(tol, p.precision_bits)
        sym = max(abs(reduced[d - n] - reduced[n]) for n in range(d + 1)) / scale
        anti = max(abs(reduced[d - n] + reduced[n]) for n in range(d + 1)) / scale
        if sym <= tol and sym <= anti:
            eps = 1
        elif anti <= tol:
            eps = -1
        else:
            raise ResidualError(
                f"q_decompose: reduction is not self-reciprocal (residuals {mpmath.nstr(sym, 5)}, {mpmath.nstr(anti, 5)})",
                min(sym, anti),
            )
        if eps != (-1) ** p.order:
            logger.warning("q_decompose: weight %s m=%s measured epsilon %s", k, p.order, eps)
        q = [mpmath.mpc(0)] * (d + 1)
        for n in range(mid, d + 1):
            q[n] = reduced[n] / 2 if n == mid else reduced[n]
    out = QDecomposition(
        q=PeriodPolynomial(
            kind="q-part",
            weight=k,
            order=p.order,
            coefficients=q,
            provenance=p.provenance,
            precision_bits=p.precision_bits,
        ),
        epsilon=eps,
        reduced=reduced,
        support=(mid, d),
        variable=variable,
    )
    with mp.workprec(p.precision_bits + GUARD_BITS):
        residual = max(abs(a - b) for a, b in zip(out.reconstruct(), reduced)) / scale
    if residual > tol:
        raise ResidualError(f"q_decompose: reconstruction residual {mpmath.nstr(residual, 5)}", residual)
    return out.model_copy(update={"residual": residual})

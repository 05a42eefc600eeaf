"""Level-1 modular forms: Eisenstein series, Miller basis, Hecke matrices and normalized eigenforms.

Integer bases are exact (src.tools.qseries); eigenvalues come from the exact characteristic
polynomial of the Hecke matrix, eigenvectors are solved at working precision.
"""

import logging
from fractions import Fraction
from functools import lru_cache

import mpmath
import sympy
from mpmath import mp

from src.config import GUARD_BITS
from src.errors import DomainError, ResidualError, TruncationError
from src.specfun import bernoulli
from src.state import FormSpec, FourierCoefficients, dim_cusp_forms
from src.tools.qseries import discriminant, eisenstein_e4, eisenstein_e6, multiply, power, sigma_series

logger = logging.getLogger(__name__)

MIN_TRUNCATION = 64


def sigma_power(n: int, r: int) -> int:
    """sigma_r(n) = sum of d^r over divisors d of n."""
    if n < 1 or r < 0:
        raise DomainError(f"sigma_power: requires n >= 1 and r >= 0, got n={n}, r={r}")
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d**r
            e = n // d
            if e != d:
                total += e**r
        d += 1
    return total


def eisenstein_constant(k: int) -> Fraction:
    """-2k / B_k, the coefficient of sigma_{k-1}(n) in E_k (240 for k=4, -504 for k=6)."""
    return Fraction(-2 * k) / bernoulli(k)


def default_truncation(k: int, prec: int, y_min: float = 1.0) -> int:
    """max(64, ceil(((P + guard) ln 2 + k ln(P k)) / (2 pi y_min))).

    Enough terms for evaluate_form at Im(tau) >= y_min at the guarded precision, for Eisenstein
    (|a_n| ~ n^(k-1)) as well as cusp (|a_n| <= 2 n^(k/2)) growth.
    """
    with mp.workprec(64):
        n = ((prec + GUARD_BITS + 16) * mpmath.log(2) + k * mpmath.log(prec * k)) / (2 * mp.pi * y_min)
        return max(MIN_TRUNCATION, int(mpmath.ceil(n)))


def eisenstein_series(k: int, n_max: int, prec: int) -> FourierCoefficients:
    if k < 4 or k % 2:
        raise DomainError(f"eisenstein_series: weight must be even and >= 4, got {k}")
    c = eisenstein_constant(k)
    sig = sigma_series(k - 1, n_max)
    with mp.workprec(prec + GUARD_BITS):
        cf = mpmath.mpf(c.numerator) / c.denominator
        coeffs = [mpmath.mpf(1)] + [cf * sig[n] for n in range(1, n_max + 1)]
    spec = FormSpec(weight=k, kind="eisenstein", precision_bits=prec, truncation=n_max)
    return FourierCoefficients(spec=spec, coeffs=coeffs)


def miller_basis(k: int, n_max: int) -> list[list[int]]:
    """Integer basis f_1..f_d of S_k with f_i = q^i + O(q^(d+1)), from Delta^j E4^a E6^c."""
    d = dim_cusp_forms(k)
    if d == 0:
        raise DomainError(f"miller_basis: no cusp forms of weight {k}")
    if n_max < d + 1:
        raise TruncationError(f"miller_basis: need at least {d + 1} coefficients, got {n_max}")
    delta = list(discriminant(n_max))
    e4 = list(eisenstein_e4(n_max))
    e6 = list(eisenstein_e6(n_max))
    rows = []
    for j in range(1, d + 1):
        r = k - 12 * j
        if r % 4 == 0:
            a, c = r // 4, 0
        else:
            a, c = (r - 6) // 4, 1
        if a < 0:
            raise DomainError(f"miller_basis: weight {k} has no monomial for j={j}")
        f = power(delta, j, n_max)
        f = multiply(f, power(e4, a, n_max), n_max)
        if c:
            f = multiply(f, e6, n_max)
        rows.append(f)
    for j in range(d - 1, -1, -1):
        for i in range(j + 1, d):
            t = rows[j][i + 1]
            if t:
                rows[j] = [x - t * y for x, y in zip(rows[j], rows[i])]
    return rows


def hecke_apply(coeffs: list, p: int, k: int, n_out: int) -> list:
    """(T_p f)_n = a_{pn} + p^(k-1) a_{n/p} for n = 0..n_out."""
    if p * n_out >= len(coeffs):
        raise TruncationError(f"hecke_apply: T_{p} needs {p * n_out + 1} coefficients, got {len(coeffs)}")
    pk = p ** (k - 1)
    out = []
    for n in range(n_out + 1):
        v = coeffs[p * n]
        if n % p == 0:
            v = v + pk * coeffs[n // p]
        out.append(v)
    return out


def hecke_matrix(k: int, p: int, basis: list[list[int]]) -> sympy.Matrix:
    """Matrix of T_p on S_k in an echelon basis: column j holds the first d coefficients of T_p f_j."""
    d = len(basis)
    cols = [hecke_apply(f, p, k, d)[1:] for f in basis]
    return sympy.Matrix(d, d, lambda i, j: cols[j][i])


@lru_cache(maxsize=32)
def _eigenforms(k: int, prec: int, n_max: int) -> tuple[tuple, ...]:
    basis = miller_basis(k, n_max)
    d = len(basis)
    m2 = hecke_matrix(k, 2, basis)
    x = sympy.Symbol("x")
    charpoly = [int(c) for c in m2.charpoly(x).all_coeffs()]
    work = prec + GUARD_BITS + 2 * k + 64
    with mp.workprec(work):
        if d == 1:
            eigenvalues = [mpmath.mpf(int(m2[0, 0]))]
        else:
            eigenvalues = [mpmath.re(r) for r in mpmath.polyroots(charpoly, maxsteps=400, extraprec=work)]
        eigenvalues.sort(reverse=True)
        mm = mpmath.matrix([[int(m2[i, j]) for j in range(d)] for i in range(d)])
        out = []
        for lam in eigenvalues:
            c = [mpmath.mpf(1)]
            if d > 1:
                a = mpmath.matrix(d - 1, d - 1)
                rhs = mpmath.matrix(d - 1, 1)
                for i in range(1, d):
                    for j in range(1, d):
                        a[i - 1, j - 1] = mm[i, j] - (lam if i == j else 0)
                    rhs[i - 1] = -mm[i, 0]
                sol = mpmath.lu_solve(a, rhs)
                c += [sol[i] for i in range(d - 1)]
            coeffs = [sum(cj * f[n] for cj, f in zip(c, basis)) for n in range(n_max + 1)]
            _check_eigen_residual(coeffs, lam, k, prec)
            out.append((lam, tuple(coeffs)))
    return tuple(out)


def _check_eigen_residual(coeffs: list, lam, k: int, prec: int) -> None:
    half = len(coeffs) // 2 - 1
    t2 = hecke_apply(coeffs, 2, k, half)
    worst = mpmath.mpf(0)
    for n in range(1, half + 1):
        scale = abs(coeffs[2 * n]) + abs(lam * coeffs[n]) + 1
        worst = max(worst, abs(t2[n] - lam * coeffs[n]) / scale)
    if worst > mpmath.ldexp(1, -prec // 2):
        raise ResidualError(f"eigenform residual {mpmath.nstr(worst, 5)} above 2^-{prec // 2} at weight {k}", worst)


def eigenforms(k: int, prec: int, n_max: int | None = None) -> list[FourierCoefficients]:
    """Normalized Hecke eigenforms of S_k (a_1 = 1), ordered by a_2 descending."""
    if k < 12 or k % 2 or dim_cusp_forms(k) == 0:
        raise DomainError(f"eigenforms: no cusp forms of weight {k}")
    n = n_max or default_truncation(k, prec)
    out = []
    for index, (lam, coeffs) in enumerate(_eigenforms(k, prec, n)):
        spec = FormSpec(weight=k, kind="cusp", index=index, precision_bits=prec, truncation=n)
        out.append(FourierCoefficients(spec=spec, coeffs=list(coeffs), eigenvalue_t2=lam))
    logger.debug("weight %s: %s eigenforms with %s coefficients", k, len(out), n)
    return out


@lru_cache(maxsize=64)
def form_coefficients(spec: FormSpec) -> FourierCoefficients:
    """q-expansion of the form a FormSpec names, truncated at spec.truncation (or the default)."""
    n = spec.truncation or default_truncation(spec.weight, spec.precision_bits)
    if spec.kind == "eisenstein":
        return eisenstein_series(spec.weight, n, spec.precision_bits)
    return eigenforms(spec.weight, spec.precision_bits, n)[spec.index]


Y_BUCKETS = 64


def _bound(kind: str, k: int) -> tuple:
    if kind == "eisenstein":
        c = eisenstein_constant(k)
        return mpmath.log(2 * abs(mpmath.mpf(c.numerator) / c.denominator)), mpmath.mpf(k - 1)
    return mpmath.log(2), mpmath.mpf(k) / 2


def coefficient_bound(f: FourierCoefficients) -> tuple:
    """(log C, g) with |a_n| <= C n^g for all n >= 1.

    Eisenstein: |c| sigma_{k-1}(n) <= 2|c| n^(k-1). Cusp eigenforms (Deligne): d(n) n^((k-1)/2) <= 2 n^(k/2).
    """
    return _bound(f.spec.kind, f.weight)


@lru_cache(maxsize=4096)
def _terms_for(kind: str, k: int, y_floor: int, prec: int, available: int) -> int | None:
    log_c, g = _bound(kind, k)
    rate = 2 * mp.pi * mpmath.mpf(y_floor) / Y_BUCKETS
    target = -(prec + 1) * mpmath.log(2)
    n = 1
    while True:
        ratio_ok = g * mpmath.log1p(mpmath.mpf(1) / n) - rate < -mpmath.log(2)
        term = log_c + g * mpmath.log(n + 1) - rate * (n + 1)
        if ratio_ok and term < target:
            return n
        n += 1
        if n > available:
            return None


def required_terms(f: FourierCoefficients, y, prec: int) -> int:
    """Number of terms after which the tail sum of |a_n| e^(-2 pi n y) is below 2^-prec.

    Im(tau) is rounded down to a multiple of 1/Y_BUCKETS, so the count is an upper bound.
    """
    y_floor = int(mpmath.floor(y * Y_BUCKETS))
    if y_floor < 1:
        raise TruncationError(f"{f.spec.label}: Im(tau)={mpmath.nstr(y, 5)} is too close to the real line")
    with mp.workprec(64):
        n = _terms_for(f.spec.kind, f.weight, y_floor, prec, f.truncation)
    if n is None:
        raise TruncationError(
            f"{f.spec.label}: {f.truncation} coefficients cannot reach 2^-{prec} at Im(tau)={mpmath.nstr(y, 5)}"
        )
    return n


def evaluate_form(f: FourierCoefficients, tau, prec: int, y_min=None, subtract_constant: bool = False):
    """f(tau) = sum a_n q^n with q = e^(2 pi i tau), for Im(tau) >= y_min."""
    with mp.workprec(prec + GUARD_BITS):
        tau = mpmath.mpmathify(tau)
        y = mpmath.im(tau)
        if y <= 0 or (y_min is not None and y < y_min):
            raise DomainError(f"evaluate_form: Im(tau)={mpmath.nstr(y, 5)} below {y_min}")
        n = required_terms(f, y, prec + GUARD_BITS)
        q = mpmath.expjpi(2 * tau)
        acc = mpmath.mpc(0)
        for c in reversed(f.coeffs[1 : n + 1]):
            acc = (acc + c) * q
        return acc if subtract_constant else acc + f.coeffs[0]

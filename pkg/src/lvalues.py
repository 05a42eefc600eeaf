"""Derivatives of completed L-functions Lambda_f(s) = (2 pi)^-s Gamma(s) L(f, s) at integer points.

Two routes:
- Mellin: Lambda^(m)(s) = I_m(s) + (-1)^m i^k I_m(k-s) + a_0 m!/(-s)^(m+1) + (-1)^m i^k a_0 m!/(s-k)^(m+1),
  with I_m(s) = integral_1^inf (f(iv) - a_0) v^(s-1) log^m(v) dv. Works for every level-1 form.
- Closed form (Eisenstein only): Lambda_{E_k}(s) = kappa_k cos(pi s/2) Lambda~(s),
  Lambda~(s) = 2 (2 pi)^-k Gamma(s) Gamma(k-s) zeta(s) zeta(k-s), kappa_k = 2k/|B_k|.

Values are memoized per (form id, m, s, P) in-process; an optional persistent store can be passed
to critical_table.
"""

import logging
import threading
from fractions import Fraction
from math import comb, factorial
from typing import Protocol

import mpmath
from mpmath import mp

from src.config import GUARD_BITS
from src.errors import DomainError, PoleProximityError, ResidualError
from src.forms import eisenstein_series, form_coefficients, default_truncation, required_terms
from src.specfun import bernoulli, harmonic, moment_cutoff, psi_diff, tan_deriv_constant, zeta, zeta_diff, zeta_logderiv_deriv
from src.state import FormSpec, FourierCoefficients, LDerivativeTable
from src.tools.quadrature import PANEL_WIDTH, integrate_segment, segment_nodes

logger = logging.getLogger(__name__)

_lock = threading.Lock()
_kernels: dict[tuple, "MellinKernel"] = {}
_values: dict[tuple, object] = {}

_COS_AT_QUARTER_TURNS = (1, 0, -1, 0)


class ValueStore(Protocol):
    def get(self, digest: str, m: int, s: int, prec: int): ...
    def put_many(self, records: list[tuple]) -> None: ...


def clear_cache() -> None:
    with _lock:
        _kernels.clear()
        _values.clear()


def _i_pow(k: int) -> int:
    """i^k for even k."""
    return 1 if k % 4 == 0 else -1


def _series_at(coeffs: list, v, n_cut: int):
    """sum_{n=1..n_cut} a_n e^(-2 pi n v) by Horner in q."""
    q = mpmath.exp(-2 * mp.pi * v)
    acc = mpmath.mpf(0)
    for c in reversed(coeffs[1 : n_cut + 1]):
        acc = (acc + c) * q
    return acc


class MellinKernel:
    """Quadrature nodes on [1, V] carrying w(v) * (f(iv) - a_0), shared by all s and m.

    Besides the nodes the kernel keeps three error sources for the moments: the tail past V, the
    q-series truncation, and a relative panel defect measured on the first panel by halving it.
    """

    def __init__(self, f: FourierCoefficients, prec: int, max_order: int):
        self.weight = f.weight
        self.a0 = f.coeffs[0]
        self.prec = prec
        self.max_order = max_order
        work = prec + GUARD_BITS
        with mp.workprec(work):
            amp = sum(abs(c) * mpmath.exp(-2 * mp.pi * (n - 1)) for n, c in enumerate(f.coeffs) if n >= 1)
            extra = max(0, int(mpmath.ceil(mpmath.log(amp + 1, 2))))
            exponent = self.weight - 2 + max_order
            self.cutoff = moment_cutoff(2 * mp.pi, exponent, work + extra)
            n_one = required_terms(f, mpmath.mpf(1), work)
            self.v, self.logv, self.wg = [], [], []
            # n_cut >= n_one / v + 2, so the dropped terms are below 2^-work e^(-4 pi (v - 1))
            dropped = mpmath.mpf(0)
            for v, w in segment_nodes(mpmath.mpf(1), self.cutoff, work):
                n_cut = min(n_one, int(mpmath.ceil(n_one / v)) + 2)
                self.v.append(v)
                self.logv.append(mpmath.log(v))
                self.wg.append(w * _series_at(f.coeffs, v, n_cut))
                dropped += w * v**exponent * mpmath.exp(-4 * mp.pi * (v - 1))

            # |f(iv) - a_0| <= amp e^(-2 pi v) for v >= 1
            V = self.cutoff
            self.tail_bound = amp * mpmath.exp(-2 * mp.pi * V) * V**exponent / (2 * mp.pi - exponent / V)
            self.series_bound = mpmath.ldexp(dropped, -work)
            self.panel_defect = self._panel_defect(f.coeffs, n_one, work)
            self.rounding = mpmath.ldexp(len(self.v), -work)
        logger.debug(
            "mellin kernel: weight %s, V=%s, %s nodes, panel defect %s",
            self.weight,
            mpmath.nstr(self.cutoff, 5),
            len(self.v),
            mpmath.nstr(self.panel_defect, 3),
        )

    def _panel_defect(self, coeffs: list, n_one: int, work: int):
        """|one panel - two half panels| / |two half panels| for the centre moment on [1, 1 + width]."""
        centre = self.weight // 2 - 1

        def integrand(v):
            return _series_at(coeffs, v, n_one) * v**centre

        a, b = mpmath.mpf(1), 1 + PANEL_WIDTH
        coarse = integrate_segment(integrand, a, b, work, panels=1)
        fine = integrate_segment(integrand, a, b, work, panels=2)
        if fine == 0:
            return mpmath.mpf(0)
        return abs(coarse - fine) / abs(fine)

    def moment(self, s, m: int):
        """I_m(s) for real s."""
        with mp.workprec(self.prec + GUARD_BITS):
            total = mpmath.mpf(0)
            for lv, wg in zip(self.logv, self.wg):
                total += wg * mpmath.exp((s - 1) * lv) * lv**m
            return total

    def _running(self, m: int, absolute: bool) -> list:
        with mp.workprec(self.prec + GUARD_BITS):
            pw = [(abs(wg) if absolute else wg) * lv**m for wg, lv in zip(self.wg, self.logv)]
            out = []
            for _ in range(1, self.weight):
                out.append(mpmath.fsum(pw))
                pw = [p * v for p, v in zip(pw, self.v)]
            return out

    def integer_moments(self, m: int) -> list:
        """[I_m(s) for s = 1..k-1], using running powers v^(s-1)."""
        return self._running(m, absolute=False)

    def integer_magnitudes(self, m: int) -> list:
        """[sum |w g(v)| v^(s-1) log^m(v) for s = 1..k-1]: the scale of each moment's rounding."""
        return self._running(m, absolute=True)

    def moment_error(self, magnitude):
        """Bound for one moment whose absolute integrand sum is magnitude."""
        return self.tail_bound + self.series_bound + (self.panel_defect + self.rounding) * magnitude


def _kernel(f: FourierCoefficients, prec: int, m: int) -> MellinKernel:
    key = (f.spec.digest, prec, f.truncation)
    with _lock:
        kern = _kernels.get(key)
    if kern is None or kern.max_order < m:
        kern = MellinKernel(f, prec, max(m, 4))
        with _lock:
            _kernels[key] = kern
    return kern


def _pole_terms(a0, k: int, m: int, s, prec: int):
    if a0 == 0:
        return mpmath.mpf(0)
    guard = mpmath.ldexp(1, -prec // 4)
    if abs(s) < guard or abs(s - k) < guard:
        raise PoleProximityError(f"s={mpmath.nstr(s, 8)} within 2^-{prec // 4} of a pole")
    mf = factorial(m)
    return a0 * mf / (-s) ** (m + 1) + (-1) ** m * _i_pow(k) * a0 * mf / (s - k) ** (m + 1)


def lambda_deriv_mellin(f: FourierCoefficients, m: int, s, prec: int):
    """Lambda_f^(m)(s) by the Mellin route, for any real s."""
    if m < 0:
        raise DomainError(f"lambda_deriv_mellin: m must be >= 0, got {m}")
    k = f.weight
    kern = _kernel(f, prec, m)
    with mp.workprec(prec + GUARD_BITS):
        s = mpmath.mpf(s)
        pole = _pole_terms(f.coeffs[0], k, m, s, prec)
        value = kern.moment(s, m) + (-1) ** m * _i_pow(k) * kern.moment(k - s, m) + pole
        return mpmath.mpc(value)


def eisenstein_normalizer(k: int, prec: int):
    """kappa_k = (2 pi)^k / (zeta(k) Gamma(k)) = 2k / |B_k| > 0."""
    c = Fraction(2 * k) / abs(bernoulli(k))
    with mp.workprec(prec + GUARD_BITS):
        return mpmath.mpf(c.numerator) / c.denominator


def _check_weight(k: int) -> None:
    if k < 4 or k % 2:
        raise DomainError(f"weight must be even and >= 4, got {k}")


def _tilde_derivatives(k: int, m: int, s, prec: int) -> list:
    """[Lambda~^(0..m)(s)] by the log-derivative recurrence with g^(j) = Psi_j + Z_j."""
    if not (1 < s < k - 1):
        raise DomainError(f"Lambda~ needs 1 < s < k-1, got s={s}, k={k}")
    with mp.workprec(prec + GUARD_BITS):
        base = 2 * (2 * mp.pi) ** (-k) * mpmath.gamma(s) * mpmath.gamma(k - s) * zeta(s, prec) * zeta(k - s, prec)
        g = [None] + [psi_diff(j, s, k, prec) + zeta_diff(j, s, k, prec) for j in range(1, m + 1)]
        out = [base]
        for n in range(1, m + 1):
            out.append(sum(comb(n - 1, j) * out[j] * g[n - j] for j in range(n)))
        return out


def lambda_tilde_deriv(k: int, m: int, s: int, prec: int):
    """Lambda~^(m)(s) for even s in [2, k-2] (no kappa_k, no cosine factor)."""
    _check_weight(k)
    if m < 0 or s % 2 or not 2 <= s <= k - 2:
        raise DomainError(f"lambda_tilde_deriv: needs m >= 0 and even s in [2, {k - 2}], got m={m}, s={s}")
    return _tilde_derivatives(k, m, s, prec)[m]


def lambda_eisenstein(k: int, s, prec: int):
    """Lambda_{E_k}(s) for real s in [1, k-1]; the endpoints go through the Mellin route."""
    _check_weight(k)
    if not 1 <= s <= k - 1:
        raise DomainError(f"lambda_eisenstein: s={s} outside [1, {k - 1}]")
    if s == 1 or s == k - 1:
        return mpmath.re(_eisenstein_mellin(k, 0, s, prec))
    with mp.workprec(prec + GUARD_BITS):
        s = mpmath.mpf(s)
        return eisenstein_normalizer(k, prec) * mpmath.cospi(s / 2) * _tilde_derivatives(k, 0, s, prec)[0]


def _eisenstein_mellin(k: int, m: int, s, prec: int):
    f = eisenstein_series(k, default_truncation(k, prec), prec)
    return lambda_deriv_mellin(f, m, s, prec)


def _tilde_magnitudes(k: int, m: int, s, prec: int) -> list:
    """The tilde recurrence run on absolute values of every summand; scales the rounding of each derivative."""
    with mp.workprec(prec + GUARD_BITS):
        base = abs(2 * (2 * mp.pi) ** (-k) * mpmath.gamma(s) * mpmath.gamma(k - s) * zeta(s, prec) * zeta(k - s, prec))
        g = [None]
        for j in range(1, m + 1):
            g.append(
                abs(mpmath.psi(j - 1, s))
                + abs(mpmath.psi(j - 1, k - s))
                + abs(zeta_logderiv_deriv(j - 1, s, prec))
                + abs(zeta_logderiv_deriv(j - 1, k - s, prec))
            )
        out = [base]
        for n in range(1, m + 1):
            out.append(sum(comb(n - 1, j) * out[j] * g[n - j] for j in range(n)))
        return out


def _leibniz(m: int, s: int, tilde: list):
    half_pi = mp.pi / 2
    total = mpmath.mpf(0)
    for j in range(m + 1):
        c = _COS_AT_QUARTER_TURNS[(s + j) % 4]
        if c:
            total += comb(m, j) * c * half_pi**j * tilde[m - j]
    return total


def _closed_form_error(k: int, m: int, s: int, prec: int):
    """Rounding bound for the closed-form value: (m + 2)^2 working-precision units of the magnitude sum."""
    mags = _tilde_magnitudes(k, m, s, prec)
    with mp.workprec(prec + GUARD_BITS):
        scale = sum(comb(m, j) * (mp.pi / 2) ** j * mags[m - j] for j in range(m + 1))
        return mpmath.ldexp((m + 2) ** 2 * eisenstein_normalizer(k, prec) * scale, -(prec + GUARD_BITS) + 2)


def lambda_deriv_eisenstein(k: int, m: int, s: int, prec: int):
    """Lambda_{E_k}^(m)(s) for integer s in [1, k-1] by Leibniz with exact cosine derivatives.

    d^j/ds^j cos(pi s/2) = (pi/2)^j cos(pi (s+j)/2), which is 0 or +-(pi/2)^j at integers.
    """
    _check_weight(k)
    if m < 0 or not 1 <= s <= k - 1 or int(s) != s:
        raise DomainError(f"lambda_deriv_eisenstein: needs m >= 0 and integer s in [1, {k - 1}], got m={m}, s={s}")
    s = int(s)
    if s in (1, k - 1):
        return mpmath.re(_eisenstein_mellin(k, m, s, prec))
    tilde = _tilde_derivatives(k, m, s, prec)
    with mp.workprec(prec + GUARD_BITS):
        return eisenstein_normalizer(k, prec) * _leibniz(m, s, tilde)


def lambda_deriv_even(k: int, m: int, s: int, prec: int):
    """Lambda_{E_k}^(m)(s) at even s via the log-derivative of Lambda itself:
    G^(j) = b_j + Psi_j + Z_j with b_j the tangent-derivative constants."""
    _check_weight(k)
    if m < 0 or s % 2 or not 2 <= s <= k - 2:
        raise DomainError(f"lambda_deriv_even: needs even s in [2, {k - 2}], got s={s}")
    with mp.workprec(prec + GUARD_BITS):
        big_g = [None] + [
            tan_deriv_constant(j, prec) + psi_diff(j, s, k, prec) + zeta_diff(j, s, k, prec) for j in range(1, m + 1)
        ]
        out = [lambda_eisenstein(k, s, prec)]
        for n in range(1, m + 1):
            out.append(sum(comb(n - 1, j) * out[j] * big_g[n - j] for j in range(n)))
        return out[m]


def lambda_prime_even(k: int, s: int, prec: int):
    """Lambda'_{E_k}(s) at even s: Lambda(s) (H_{s-1} - H_{k-s-1} + zeta'/zeta(s) - zeta'/zeta(k-s))."""
    _check_weight(k)
    if s % 2 or not 2 <= s <= k - 2:
        raise DomainError(f"lambda_prime_even: needs even s in [2, {k - 2}], got s={s}")
    h = harmonic(s - 1) - harmonic(k - s - 1)
    with mp.workprec(prec + GUARD_BITS):
        factor = mpmath.mpf(h.numerator) / h.denominator
        factor += zeta_logderiv_deriv(0, s, prec) - zeta_logderiv_deriv(0, k - s, prec)
        return lambda_eisenstein(k, s, prec) * factor


def _resolve(form) -> FourierCoefficients | FormSpec:
    if isinstance(form, (FourierCoefficients, FormSpec)):
        return form
    raise DomainError(f"unsupported form argument: {type(form).__name__}")


def critical_table(form, m: int, prec: int, store: ValueStore | None = None) -> LDerivativeTable:
    """Lambda_f^(m)(s) for s = 1..k-1, with error estimates and the functional-equation residual.

    Eisenstein series use the closed form on 2..k-2 and Mellin at 1 and k-1; cusp forms use Mellin.
    Mellin entries are bounded by the kernel's tail, truncation, panel and rounding terms; closed-form
    entries by a running rounding bound. Values read back from the persistent store carry the 2^-P
    target they were stored under.
    """
    form = _resolve(form)
    spec = form.spec if isinstance(form, FourierCoefficients) else form
    if m < 0:
        raise DomainError(f"critical_table: m must be >= 0, got {m}")
    k = spec.weight
    digest = spec.digest
    values: list = [None] * (k - 1)
    errors: list = [None] * (k - 1)
    routes: list = [None] * (k - 1)
    for s in range(1, k):
        routes[s - 1] = "closed-form" if spec.kind == "eisenstein" and 2 <= s <= k - 2 else "mellin"
        with _lock:
            hit = _values.get((digest, m, s, prec))
        if hit is not None:
            values[s - 1], errors[s - 1] = hit
        elif store is not None:
            stored = store.get(digest, m, s, prec)
            if stored is not None:
                values[s - 1] = stored
                with mp.workprec(prec + GUARD_BITS):
                    errors[s - 1] = mpmath.ldexp(1 + abs(stored), -prec)

    missing = [s for s in range(1, k) if values[s - 1] is None]
    if missing:
        mellin_needed = [s for s in missing if routes[s - 1] == "mellin"]
        if mellin_needed:
            if isinstance(form, FourierCoefficients):
                f = form
            elif spec.kind == "eisenstein":
                f = eisenstein_series(k, default_truncation(k, prec), prec)
            else:
                f = form_coefficients(spec.model_copy(update={"precision_bits": prec}))
            kern = _kernel(f, prec, m)
            fwd = kern.integer_moments(m)
            mags = kern.integer_magnitudes(m)
            with mp.workprec(prec + GUARD_BITS):
                sign = (-1) ** m * _i_pow(k)
                for s in mellin_needed:
                    pole = _pole_terms(f.coeffs[0], k, m, mpmath.mpf(s), prec)
                    values[s - 1] = mpmath.mpc(fwd[s - 1] + sign * fwd[k - s - 1] + pole)
                    errors[s - 1] = (
                        kern.moment_error(mags[s - 1])
                        + kern.moment_error(mags[k - s - 1])
                        + mpmath.ldexp(abs(pole), -(prec + GUARD_BITS) + 2)
                    )
        for s in missing:
            if routes[s - 1] == "closed-form":
                values[s - 1] = mpmath.mpc(lambda_deriv_eisenstein(k, m, s, prec))
                errors[s - 1] = _closed_form_error(k, m, s, prec)
        with _lock:
            for s in missing:
                _values[(digest, m, s, prec)] = (values[s - 1], errors[s - 1])
        if store is not None:
            store.put_many([(digest, m, s, prec, values[s - 1]) for s in missing])

    with mp.workprec(prec + GUARD_BITS):
        sign = (-1) ** m * _i_pow(k)
        scale = max([abs(v) for v in values] + [mpmath.mpf(1)])
        residual = max(abs(values[s - 1] - sign * values[k - s - 1]) for s in range(1, k)) / scale
    if residual > mpmath.ldexp(1, -prec // 2):
        raise ResidualError(f"{spec.label} m={m}: functional-equation residual {mpmath.nstr(residual, 5)}", residual)
    logger.info("table %s m=%s P=%s built (%s new entries)", spec.label, m, prec, len(missing))
    return LDerivativeTable(
        spec=spec, order=m, precision_bits=prec, values=values, errors=errors, routes=routes, fe_residual=residual
    )

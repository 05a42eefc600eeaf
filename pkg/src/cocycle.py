"""Numerical checks of the Eichler-type cochains attached to L-derivatives.

u(tau) = 2 log eta(tau) is the weight-one eta logarithm, defined by its q-series so no branch is
tracked along paths. v(gamma)(tau) = u(gamma tau) - u(tau) = log j(gamma, tau) + c_gamma, the cup
powers V_n multiply v along the orbit, and v_f integrates (f - a_0)(w - z)^(k-2) V_n(w) from the
cusp to z. sigma_f is the bar differential of v_f; its value at (S, ..., S) is compared with the
period polynomial of the m-th derivative table.
"""

import logging
from functools import lru_cache
from math import comb, factorial
from typing import Any, Callable

import mpmath
from mpmath import mp
from pydantic import BaseModel, ConfigDict

from src.config import DEFAULT_Y_MIN, GUARD_BITS
from src.errors import DomainError, ResidualError
from src.forms import default_truncation, evaluate_form, form_coefficients, required_terms
from src.lvalues import critical_table
from src.periodpoly import evaluate, full_polynomial, i_power
from src.specfun import moment_cutoff
from src.state import IDENTITY, FormSpec, FourierCoefficients, GroupElement, S
from src.tools.qseries import sigma_series
from src.tools.quadrature import PANEL_WIDTH, panel_count, segment_nodes

logger = logging.getLogger(__name__)

REDUCE_BELOW = mpmath.mpf(1) / 2
TEST_POINTS = ("0.1 1.05", "-0.2 0.9", "0.3 1.2")
MAX_FORMULA_ORDER = 2


class CGamma(BaseModel):
    """c_gamma in u(gamma tau) = u(tau) + log j(gamma, tau) + c_gamma, measured at test points."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    gamma: GroupElement
    constant: Any
    residual: Any
    normalization: str = "weight-one"


class PathIntegralSpec(BaseModel):
    """A straight-segment contour. start=None encodes the cusp i*infinity, reached vertically from end."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    start: Any = None
    end: Any
    panels: int
    precision_bits: int
    cutoff: Any = None
    integrand: str = ""

    def nodes(self) -> list[tuple]:
        """[(point, weight)] so that sum(w * F(point)) approximates the integral from start to end."""
        if self.start is None:
            top = self.end + mpmath.mpc(0, self.cutoff)
            return [(x, -w) for x, w in segment_nodes(self.end, top, self.precision_bits, self.panels)]
        return segment_nodes(self.start, self.end, self.precision_bits, self.panels)


def _point(text: str):
    re_part, im_part = text.split()
    return mpmath.mpc(re_part, im_part)


@lru_cache(maxsize=16)
def _eta_coefficients(n_max: int, prec: int) -> tuple:
    """sigma_1(N)/N for N = 0..n_max: sum_n Log(1 - q^n) = -sum_N sigma_1(N)/N q^N."""
    sig = sigma_series(1, n_max)
    with mp.workprec(prec):
        return tuple([mpmath.mpf(0)] + [mpmath.mpf(sig[n]) / n for n in range(1, n_max + 1)])


def _eta_terms(y, prec: int) -> int:
    # sigma_1(N)/N <= N, so the tail is dominated by integral of v e^(-2 pi y v)
    with mp.workprec(64):
        return int(mpmath.ceil(moment_cutoff(2 * mp.pi * y, 1, prec))) + 1


def eta_log(tau, prec: int, y_min=None):
    """log eta(tau) = pi i tau / 12 + sum_n Log(1 - e^(2 pi i n tau)), principal Log per factor."""
    y_min = DEFAULT_Y_MIN if y_min is None else y_min
    with mp.workprec(prec + GUARD_BITS):
        tau = mpmath.mpmathify(tau)
        y = mpmath.im(tau)
        if y < y_min:
            raise DomainError(f"eta_log: Im(tau)={mpmath.nstr(y, 5)} below {y_min}")
        n = _eta_terms(y, prec + GUARD_BITS)
        coeffs = _eta_coefficients(n, prec + GUARD_BITS)
        q = mpmath.expjpi(2 * tau)
        acc = mpmath.mpc(0)
        for c in reversed(coeffs[1:]):
            acc = (acc + c) * q
        return mp.pi * 1j * tau / 12 - acc


def u_log(tau, prec: int):
    """u = 2 log eta anywhere in the upper half-plane.

    Points below REDUCE_BELOW are moved up with u(tau + 1) = u(tau) + pi i/6 and
    u(-1/tau) = u(tau) + Log(tau) - pi i/2 before the series is summed.
    """
    with mp.workprec(prec + GUARD_BITS):
        tau = mpmath.mpmathify(tau)
        if mpmath.im(tau) <= 0:
            raise DomainError(f"u_log: tau={mpmath.nstr(tau, 8)} is not in the upper half-plane")
        acc = mpmath.mpc(0)
        for _ in range(10000):
            if mpmath.im(tau) >= REDUCE_BELOW:
                break
            shift = int(mpmath.nint(mpmath.re(tau)))
            tau -= shift
            acc += shift * mp.pi * 1j / 6
            if mpmath.im(tau) >= REDUCE_BELOW:
                break
            acc += -mpmath.log(tau) + mp.pi * 1j / 2
            tau = -1 / tau
        else:
            raise DomainError("u_log: reduction did not terminate")
        return acc + 2 * eta_log(tau, prec, y_min=REDUCE_BELOW)


def v_one(gamma: GroupElement, tau, prec: int):
    """v(gamma)(tau) = u(gamma tau) - u(tau)."""
    if gamma.is_scalar:
        return mpmath.mpc(0)
    with mp.workprec(prec + GUARD_BITS):
        tau = mpmath.mpmathify(tau)
        return u_log(gamma.act(tau), prec) - u_log(tau, prec)


def cocycle_constant(gamma: GroupElement, prec: int, points=None, normalization: str = "weight-one") -> CGamma:
    """Measure c_gamma at three test points, using the eta series without modular reduction.

    normalization "weight-one" uses u = 2 log eta and log j; "eta" uses log eta and (1/2) log j.
    """
    if normalization not in ("weight-one", "eta"):
        raise DomainError(f"cocycle_constant: unknown normalization {normalization!r}")
    scale = 2 if normalization == "weight-one" else 1
    with mp.workprec(prec + GUARD_BITS):
        taus = [mpmath.mpmathify(p) for p in points] if points else [_point(p) for p in TEST_POINTS]
        samples = []
        for tau in taus:
            image = gamma.act(tau)
            diff = scale * (eta_log(image, prec) - eta_log(tau, prec))
            samples.append(diff - scale * mpmath.log(gamma.j(tau)) / 2)
        constant = samples[0]
        residual = max(abs(c - constant) for c in samples)
    if residual > mpmath.ldexp(1, -prec // 2):
        raise ResidualError(
            f"cocycle_constant {gamma.name}: c_gamma varies by {mpmath.nstr(residual, 5)} across test points", residual
        )
    return CGamma(gamma=gamma, constant=constant, residual=residual, normalization=normalization)


def cocycle_residual(g1: GroupElement, g2: GroupElement, tau, prec: int):
    """|v(g2 g1)(tau) - v(g2)(g1 tau) - v(g1)(tau)|."""
    with mp.workprec(prec + GUARD_BITS):
        tau = mpmath.mpmathify(tau)
        return abs(v_one(g2 @ g1, tau, prec) - v_one(g2, g1.act(tau), prec) - v_one(g1, tau, prec))


def _normalized(g: GroupElement) -> tuple:
    """Matrix key up to sign (g and -g act identically)."""
    if g.a < 0 or (g.a == 0 and g.c < 0):
        return (-g.a, -g.b, -g.c, -g.d)
    return (g.a, g.b, g.c, g.d)


def _orbit(gammas: tuple) -> list[GroupElement]:
    """Prefix products I, g1, g2 g1, ..., gn ... g1."""
    out = [IDENTITY]
    for g in gammas:
        out.append(g @ out[-1])
    return out


def _cup_on_orbit(orbit: list[GroupElement], tau, prec: int):
    u_at: dict[tuple, object] = {}
    values = []
    for g in orbit:
        key = _normalized(g)
        if key not in u_at:
            u_at[key] = u_log(g.act(tau), prec)
        values.append(u_at[key])
    acc = mpmath.mpc(1)
    for before, after in zip(values, values[1:]):
        acc *= after - before
    return acc


def cup_power(gammas: tuple, tau, prec: int):
    """V_n(g1, ..., gn)(tau) = v(g1)(tau) V_(n-1)(g2, ..., gn)(g1 tau)."""
    gammas = tuple(gammas)
    if not gammas:
        raise DomainError("cup_power: needs n >= 1")
    if any(g.is_scalar for g in gammas):
        return mpmath.mpc(0)
    with mp.workprec(prec + GUARD_BITS):
        return _cup_on_orbit(_orbit(gammas), mpmath.mpmathify(tau), prec)


def cusp_path(f: FourierCoefficients, n: int, z, prec: int) -> PathIntegralSpec:
    """Vertical path from i*infinity down to z with a cutoff past which the integrand is below 2^-prec.

    Bound used: |f(z + it) - a_0| <= A e^(-2 pi t), |w - z|^(k-2) = t^(k-2) and, for the short
    words in S and T used here, |V_n(w)| <= (t + |z| + 3)^n.
    """
    k = f.weight
    with mp.workprec(prec + GUARD_BITS):
        y = mpmath.im(z)
        terms = required_terms(f, y, prec)
        q = mpmath.exp(-2 * mp.pi * y)
        amplitude = mpmath.fsum(abs(c) * q**i for i, c in enumerate(f.coeffs[1 : terms + 1], start=1))
        shift = abs(z) + 3
        extra = max(0, int(mpmath.ceil((mpmath.log(amplitude + 1) + 2 * mp.pi * shift) / mpmath.log(2))))
        top = moment_cutoff(2 * mp.pi, k - 2 + n, prec + extra) - shift
        top = max(top, PANEL_WIDTH)
        return PathIntegralSpec(
            start=None,
            end=z,
            panels=panel_count(top),
            precision_bits=prec + GUARD_BITS,
            cutoff=top,
            integrand=f"{f.spec.label} (w-z)^{k - 2} V_{n}",
        )


def v_f_cochain(f: FourierCoefficients, gammas: tuple, z, prec: int, y_min=None):
    """v_f(g1..gn)(z) = int_inf^z (f - a_0)(w - z)^(k-2) V_n(w) dw + a_0 int_i^z (w - z)^(k-2) V_n(w) dw.

    For n = 0 the a_0 term is a_0 z^(k-1)/(k-1).
    """
    gammas = tuple(gammas)
    k = f.weight
    n = len(gammas)
    y_min = DEFAULT_Y_MIN if y_min is None else y_min
    if any(g.is_scalar for g in gammas):
        return mpmath.mpc(0)
    with mp.workprec(prec + GUARD_BITS):
        z = mpmath.mpmathify(z)
        if mpmath.im(z) < y_min:
            raise DomainError(f"v_f_cochain: Im(z)={mpmath.nstr(mpmath.im(z), 5)} below {y_min}")
        orbit = _orbit(gammas)

        def weight(w):
            return mpmath.mpc(1) if n == 0 else _cup_on_orbit(orbit, w, prec)

        path = cusp_path(f, n, z, prec)
        total = mpmath.mpc(0)
        for w, c in path.nodes():
            g = evaluate_form(f, w, prec, subtract_constant=True)
            total += c * g * (w - z) ** (k - 2) * weight(w)

        a0 = f.coeffs[0]
        if a0 != 0:
            if n == 0:
                total += a0 * z ** (k - 1) / (k - 1)
            elif z != 1j:
                start = mpmath.mpc(0, 1)
                segment = PathIntegralSpec(
                    start=start, end=z, panels=panel_count(z - start), precision_bits=prec + GUARD_BITS
                )
                inner = mpmath.mpc(0)
                for w, c in segment.nodes():
                    inner += c * (w - z) ** (k - 2) * weight(w)
                total += a0 * inner
        return total


Evaluator = Callable[[tuple, Any], Any]


def bar_differential(evaluator: Evaluator, n: int, gammas: tuple, z, k: int, prec: int):
    """(d sigma)(g1..g_(n+1))(z) for an n-cochain sigma valued in polynomials of degree k-2.

    sigma(g2..)|g1 + sum_j (-1)^j sigma(.., g_(j+1) g_j, ..) + (-1)^(n+1) sigma(g1..gn).
    """
    gammas = tuple(gammas)
    if len(gammas) != n + 1:
        raise DomainError(f"bar_differential: degree {n} needs {n + 1} group elements, got {len(gammas)}")
    with mp.workprec(prec + GUARD_BITS):
        z = mpmath.mpmathify(z)
        g1 = gammas[0]
        total = evaluator(gammas[1:], g1.act(z)) * g1.j(z) ** (k - 2)
        for j in range(1, n + 1):
            merged = gammas[: j - 1] + (gammas[j] @ gammas[j - 1],) + gammas[j + 1 :]
            total += (-1) ** j * evaluator(merged, z)
        total += (-1) ** (n + 1) * evaluator(gammas[:n], z)
        return total


def sigma_f(f: FourierCoefficients, gammas: tuple, z, prec: int):
    """d v_f evaluated at (g1..g_(n+1))."""
    gammas = tuple(gammas)
    return bar_differential(
        lambda t, w: v_f_cochain(f, t, w, prec), len(gammas) - 1, gammas, z, f.weight, prec
    )


def correction_polynomial(k: int, m: int, prec: int) -> list:
    """P(z) = sum_n C(k-2,n) i^(1-n) / (-n-1)^(m+1) z^(k-2-n), ascending coefficients."""
    coeffs = [mpmath.mpc(0)] * (k - 1)
    with mp.workprec(prec + GUARD_BITS):
        for n in range(k - 1):
            coeffs[k - 2 - n] = comb(k - 2, n) * i_power(1 - n) / mpmath.mpf(-n - 1) ** (m + 1)
    return coeffs


def formula_sign(m: int) -> int:
    """(-1)^(m(m-1)/2), the sign picked up by the iterated cup product at (S, ..., S)."""
    return (-1) ** (m * (m - 1) // 2)


def _coefficients_for(f, samples: list, prec: int) -> FourierCoefficients:
    if isinstance(f, FourierCoefficients):
        return f
    if not isinstance(f, FormSpec):
        raise DomainError(f"unsupported form argument: {type(f).__name__}")
    with mp.workprec(64):
        y_lo = min(min(mpmath.im(z), mpmath.im(-1 / z)) for z in samples)
        y_lo = float(min(y_lo, 1))
    n = default_truncation(f.weight, prec, y_min=max(y_lo, DEFAULT_Y_MIN))
    return form_coefficients(f.model_copy(update={"precision_bits": prec, "truncation": n}))


def value_formula_rhs(f: FourierCoefficients, m: int, z, prec: int, q: list | None = None):
    """eps_m [Q(z) - a_0 m! (P + (-1)^(m+1) P|S)(z)]; for m = 0 just Q(z)."""
    k = f.weight
    if q is None:
        q = full_polynomial(critical_table(f, m, prec)).coefficients
    with mp.workprec(prec + GUARD_BITS):
        z = mpmath.mpmathify(z)
        value = evaluate(q, z, prec)
        if m == 0:
            return value
        p = correction_polynomial(k, m, prec)
        p_slash = evaluate(p, S.act(z), prec) * S.j(z) ** (k - 2)
        corr = f.coeffs[0] * factorial(m) * (evaluate(p, z, prec) + (-1) ** (m + 1) * p_slash)
        return formula_sign(m) * (value - corr)


def value_formula_residuals(f, m: int, z_samples: list, prec: int) -> list[dict]:
    """Per-sample comparison of (-1)^m sigma_f(S, ..., S)(z) with the period-polynomial formula."""
    if m < 0 or m > MAX_FORMULA_ORDER:
        raise DomainError(f"verify_value_formula: m must be in [0, {MAX_FORMULA_ORDER}], got {m}")
    with mp.workprec(prec + GUARD_BITS):
        samples = [mpmath.mpmathify(z) for z in z_samples]
    coeffs = _coefficients_for(f, samples, prec)
    q = full_polynomial(critical_table(coeffs, m, prec)).coefficients
    gammas = (S,) * (m + 1)
    out = []
    for z in samples:
        with mp.workprec(prec + GUARD_BITS):
            lhs = (-1) ** m * sigma_f(coeffs, gammas, z, prec)
            rhs = value_formula_rhs(coeffs, m, z, prec, q=q)
            residual = abs(lhs - rhs)
        logger.info(
            "value formula %s m=%s z=%s: residual %s", coeffs.spec.label, m, mpmath.nstr(z, 8), mpmath.nstr(residual, 5)
        )
        out.append({"z": z, "sigma": lhs, "formula": rhs, "residual": residual})
    return out


def verify_value_formula(f, m: int, z_samples: list, prec: int):
    """Max |(-1)^m sigma_f(S^(m+1))(z) - formula(z)| over z_samples (m <= 2)."""
    rows = value_formula_residuals(f, m, z_samples, prec)
    return max(row["residual"] for row in rows)


def _interpolation_nodes(k: int) -> tuple[list, object, object]:
    center = mpmath.mpc(0, "1.3")
    nodes = [center + mpmath.mpf("0.4") * mpmath.expjpi(mpmath.mpf(2 * j) / (k - 1)) for j in range(k - 1)]
    return nodes, center, center + mpmath.mpf("0.1")


def interpolation_residual(f: FourierCoefficients, gammas: tuple, prec: int):
    """Relative error of predicting sigma_f(gammas) at a held-out point from a degree k-2 interpolant.

    Small values confirm that sigma_f takes values in polynomials of degree <= k-2.
    """
    k = f.weight
    with mp.workprec(prec + GUARD_BITS):
        nodes, center, held_out = _interpolation_nodes(k)
        values = [sigma_f(f, gammas, z, prec) for z in nodes]
        a = mpmath.matrix(k - 1, k - 1)
        for i, z in enumerate(nodes):
            for j in range(k - 1):
                a[i, j] = (z - center) ** j
        sol = mpmath.lu_solve(a, mpmath.matrix(values))
        predicted = evaluate([sol[j] for j in range(k - 1)], held_out - center, prec)
        actual = sigma_f(f, gammas, held_out, prec)
        scale = max([abs(v) for v in values] + [abs(actual), mpmath.mpf(1)])
        return abs(predicted - actual) / scale


def coboundary_residual(f: FourierCoefficients, gammas: tuple, z, prec: int):
    """|d(d v_f)(gammas)(z)| for a tuple of n + 2 elements; zero for any cochain."""
    gammas = tuple(gammas)
    k = f.weight
    if len(gammas) < 2:
        raise DomainError("coboundary_residual: needs at least two group elements")

    def inner(t: tuple, w):
        return bar_differential(lambda s, x: v_f_cochain(f, s, x, prec), len(t) - 1, t, w, k, prec)

    return abs(bar_differential(inner, len(gammas) - 1, gammas, z, k, prec))

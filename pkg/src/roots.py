"""Simultaneous (Aberth-Ehrlich) root finding in mpmath and root-geometry classification."""

import logging

import mpmath
from mpmath import mp

from src.config import GUARD_BITS
from src.errors import ConvergenceError, DomainError
from src.state import LocatedRoot, PeriodPolynomial, RootReport

logger = logging.getLogger(__name__)

INITIAL_ANGLE = mpmath.mpf("0.4")
LOCI = ("on-circle", "origin", "quadruple", "unclassified", "ambiguous")


def _coeff_list(p) -> list:
    return list(p.coefficients) if isinstance(p, PeriodPolynomial) else list(p)


def _horner(c: list, z):
    """p(z), p'(z) and sum |c_i| |z|^i for monic-or-not ascending coefficients."""
    p = mpmath.mpc(0)
    dp = mpmath.mpc(0)
    size = mpmath.mpf(0)
    az = abs(z)
    for a in reversed(c):
        dp = dp * z + p
        p = p * z + a
        size = size * az + abs(a)
    return p, dp, size


def find_roots(p, prec: int, max_iter: int | None = None) -> list[LocatedRoot]:
    """All roots of p with a-posteriori radii deg * |p(z)| / |p'(z)|.

    Stops when the largest relative correction drops below 2^(-P+16), or when every residual is
    at the rounding level of the evaluation (multiple roots converge only linearly).
    """
    coeffs = _coeff_list(p)
    with mp.workprec(prec + GUARD_BITS):
        coeffs = [mpmath.mpc(c) for c in coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        deg = len(coeffs) - 1
        if deg < 1:
            raise DomainError("find_roots: polynomial must have degree >= 1")
        scale = max(abs(c) for c in coeffs)
        if abs(coeffs[-1]) <= mpmath.ldexp(scale, -prec // 2):
            raise DomainError("find_roots: leading coefficient is numerically zero")
        zeros = 0
        while coeffs[zeros] == 0:
            zeros += 1
        c = [x / coeffs[-1] for x in coeffs[zeros:]]
        d = len(c) - 1
        out = [LocatedRoot(value=mpmath.mpc(0), radius=mpmath.ldexp(1, -prec)) for _ in range(zeros)]
        if d == 0:
            return out

        bound = 1 + max(abs(x) for x in c[:-1])
        z = [bound * mpmath.expj(2 * mp.pi * j / d + INITIAL_ANGLE) for j in range(d)]
        step_tol = mpmath.ldexp(1, -prec + 16)
        round_tol = mpmath.ldexp(1, -prec + 8)
        cap = max_iter or 500 + 10 * d
        for it in range(cap):
            worst = mpmath.mpf(0)
            settled = True
            for j in range(d):
                val, der, size = _horner(c, z[j])
                if abs(val) > round_tol * size:
                    settled = False
                if val == 0:
                    continue
                if der == 0:
                    der = mpmath.ldexp(1, -prec)
                ratio = val / der
                pull = mpmath.fsum(1 / (z[j] - z[i]) for i in range(d) if i != j and z[j] != z[i])
                corr = ratio / (1 - ratio * pull)
                z[j] -= corr
                worst = max(worst, abs(corr) / max(1, abs(z[j])))
            if worst < step_tol or settled:
                break
        else:
            raise ConvergenceError(f"find_roots: no convergence after {cap} iterations (degree {d})")
        logger.debug("find_roots: degree %s converged in %s iterations", d, it + 1)

        floor = mpmath.ldexp(1, -prec + 8)
        for zj in z:
            val, der, _ = _horner(c, zj)
            radius = d * abs(val) / abs(der) if der != 0 else mpmath.mpf(1)
            out.append(LocatedRoot(value=zj, radius=max(radius, floor * max(1, abs(zj)))))
        return out


def classification_bits(tol, prec: int | None = None) -> int:
    """Working precision for geometry tests: P + guard when known, else enough bits to resolve tol."""
    if prec is not None:
        return prec + GUARD_BITS
    with mp.workprec(64):
        needed = int(mpmath.ceil(-mpmath.log(mpmath.mpf(tol), 2))) if tol < 1 else 0
    return max(mp.prec, needed + 2 * GUARD_BITS)


def _locus(root: LocatedRoot, tol) -> str:
    z, r = root.value, root.radius
    dev = abs(abs(z) - 1)
    if dev + r < tol:
        return "on-circle"
    if abs(z) + r < tol:
        return "origin"
    if dev - r < tol or abs(z) - r < tol:
        return "ambiguous"
    if abs(mpmath.im(z)) + r < tol:
        return "real"
    if abs(mpmath.im(z)) - r < tol:
        return "ambiguous"
    return "unclassified"


def _clusters(roots: list[LocatedRoot]) -> list[list[int]]:
    parent = list(range(len(roots)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i].value - roots[j].value) < roots[i].radius + roots[j].radius:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(roots)):
        groups.setdefault(find(i), []).append(i)
    return [g for g in groups.values() if len(g) > 1]


def classify(roots: list[LocatedRoot], tol, factored_origin: int = 0, prec: int | None = None) -> RootReport:
    """Label roots on-circle, origin, quadruple (members of {a, -a, 1/a, -1/a}), ambiguous or unclassified.

    Clusters (overlapping error discs) keep their label when all members sit on one permitted locus;
    otherwise every member becomes unclassified. All comparisons run at P + guard bits when prec is
    given, otherwise at a precision that resolves tol.
    """
    with mp.workprec(classification_bits(tol, prec)):
        tol_mp = mpmath.mpf(tol)
        labels = [_locus(r, tol_mp) for r in roots]
        quadruples = []
        real_idx = [i for i, lab in enumerate(labels) if lab == "real"]
        used: set[int] = set()

        def take(target, rel: bool) -> int | None:
            for i in real_idx:
                if i in used:
                    continue
                x = mpmath.re(roots[i].value)
                err = abs(x - target) / (abs(target) if rel else 1)
                if err < tol_mp:
                    return i
            return None

        for i in sorted(real_idx, key=lambda i: -mpmath.re(roots[i].value)):
            a = mpmath.re(roots[i].value)
            if i in used or a <= 1:
                continue
            used.add(i)
            members = [i]
            for target in (-a, 1 / a, -1 / a):
                j = take(target, rel=True)
                if j is None:
                    break
                used.add(j)
                members.append(j)
            if len(members) == 4:
                quadruples.append(a)
                for j in members:
                    labels[j] = "quadruple"
            else:
                for j in members:
                    used.discard(j)
        labels = ["unclassified" if lab == "real" else lab for lab in labels]

        clusters = _clusters(roots)
        for group in clusters:
            kinds = {labels[i] for i in group}
            if len(kinds) > 1 or kinds & {"unclassified", "ambiguous"}:
                logger.warning("root cluster %s spans loci %s; marking unclassified", group, sorted(kinds))
                for i in group:
                    labels[i] = "unclassified"

        on_circle = [abs(abs(r.value) - 1) for r, lab in zip(roots, labels) if lab == "on-circle"]
        deviation = max(on_circle) if on_circle else None
    located = [LocatedRoot(value=r.value, radius=r.radius, locus=lab) for r, lab in zip(roots, labels)]
    counts = {name: labels.count(name) for name in LOCI}
    return RootReport(
        degree=len(roots),
        tolerance=float(tol),
        roots=located,
        counts=counts,
        quadruples=quadruples,
        clusters=clusters,
        max_circle_deviation=deviation,
        factored_origin=factored_origin,
    )


def unit_disk_check(q, tol, prec: int) -> tuple[bool, object]:
    """(every root has |z| <= 1 + tol, max |root|), compared at P + guard bits."""
    roots = find_roots(q, prec)
    with mp.workprec(classification_bits(tol, prec)):
        witness = max((abs(r.value) for r in roots), default=mpmath.mpf(0))
        return bool(witness <= 1 + mpmath.mpf(tol)), witness

"""Exact integer q-series arithmetic truncated at q^N (lists a_0..a_N)."""

from functools import lru_cache


def sigma_series(r: int, n_max: int) -> list[int]:
    """[sigma_r(0)=0, sigma_r(1), ..., sigma_r(n_max)] by a divisor sieve."""
    out = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        p = d**r
        for m in range(d, n_max + 1, d):
            out[m] += p
    return out


def multiply(a: list[int], b: list[int], n_max: int) -> list[int]:
    out = [0] * (n_max + 1)
    for i, ai in enumerate(a[: n_max + 1]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[: n_max + 1 - i]):
            out[i + j] += ai * bj
    return out


def power(a: list[int], e: int, n_max: int) -> list[int]:
    out = [1] + [0] * n_max
    base = list(a[: n_max + 1])
    while e:
        if e & 1:
            out = multiply(out, base, n_max)
        e >>= 1
        if e:
            base = multiply(base, base, n_max)
    return out


@lru_cache(maxsize=8)
def eisenstein_e4(n_max: int) -> tuple[int, ...]:
    s = sigma_series(3, n_max)
    return tuple([1] + [240 * s[n] for n in range(1, n_max + 1)])


@lru_cache(maxsize=8)
def eisenstein_e6(n_max: int) -> tuple[int, ...]:
    s = sigma_series(5, n_max)
    return tuple([1] + [-504 * s[n] for n in range(1, n_max + 1)])


@lru_cache(maxsize=8)
def discriminant(n_max: int) -> tuple[int, ...]:
    """Delta = (E4^3 - E6^2) / 1728 = q - 24 q^2 + 252 q^3 - ..."""
    e4 = list(eisenstein_e4(n_max))
    e6 = list(eisenstein_e6(n_max))
    num = [x - y for x, y in zip(power(e4, 3, n_max), power(e6, 2, n_max))]
    assert all(c % 1728 == 0 for c in num)
    return tuple(c // 1728 for c in num)

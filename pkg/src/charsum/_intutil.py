"""Small integer-arithmetic helpers shared across modules."""

from __future__ import annotations

import math
from functools import lru_cache


@lru_cache(maxsize=None)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of n >= 1 as ((p, e), ...) with p ascending."""
    assert n >= 1
    out = []
    m = n
    d = 2
    while d * d <= m:
        if m % d == 0:
            e = 0
            while m % d == 0:
                m //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if m > 1:
        out.append((m, 1))
    return tuple(out)


def prime_divisors(n: int) -> tuple[int, ...]:
    return tuple(p for p, _ in factorize(n))


@lru_cache(maxsize=None)
def euler_phi(n: int) -> int:
    r = 1
    for p, e in factorize(n):
        r *= (p - 1) * p ** (e - 1)
    return r


@lru_cache(maxsize=None)
def moebius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


@lru_cache(maxsize=None)
def divisors(n: int) -> tuple[int, ...]:
    ds = [1]
    for p, e in factorize(n):
        ds = [d * p ** k for d in ds for k in range(e + 1)]
    return tuple(sorted(ds))


def crt(r1: int, m1: int, r2: int, m2: int) -> int:
    """Residue mod m1*m2 matching r1 mod m1 and r2 mod m2 (coprime moduli)."""
    assert math.gcd(m1, m2) == 1
    u = pow(m2, -1, m1)
    x = r2 + m2 * (((r1 - r2) * u) % m1)
    return x % (m1 * m2)

"""Exact arithmetic in cyclotomic integer rings Z[zeta_M].

A value is a coefficient vector over the power basis 1, x, ..., x^{phi(M)-1}
of Q(zeta_M), reduced mod the M-th cyclotomic polynomial.  Every operation is
exact; no floating point appears anywhere in this module.

Polynomial products use Kronecker substitution (pack coefficients into one big
integer) above a small cutoff, and reduction mod Phi_M uses a cached Barrett
inverse, so Gauss-sum accumulation stays fast even at orders in the thousands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence, Union

from charsum._intutil import euler_phi, factorize, moebius

# ------------------------------------------------------------------ integer
# polynomials: tuples of coefficients, index = degree

_SCHOOLBOOK_MAX = 32


def _trim(p: Sequence[int]) -> tuple[int, ...]:
    if not p:
        return (0,)
    n = len(p)
    while n > 1 and p[n - 1] == 0:
        n -= 1
    return tuple(p[:n])


def _window_sums(a: Sequence[int], width: int, out_len: int) -> list[int]:
    # coefficient k of a(x) * (1 + x + ... + x^{width-1}), via prefix sums
    pre = [0]
    for c in a:
        pre.append(pre[-1] + c)
    m = len(a)
    out = []
    for k in range(out_len):
        hi = min(k, m - 1)
        lo = max(0, k - width + 1)
        out.append(pre[hi + 1] - pre[lo] if hi >= lo else 0)
    return out


def _kronecker_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    # signed coefficients: shift both operands nonnegative, multiply packed
    # integers, then correct with O(n) window sums
    m, n = len(a), len(b)
    out_len = m + n - 1
    ca = max(0, -min(a))
    cb = max(0, -min(b))
    ap = [c + ca for c in a]
    bp = [c + cb for c in b]
    bound = max(min(m, n) * max(ap) * max(bp), max(ap), max(bp)) + 1
    nbytes = (bound.bit_length() + 8) // 8
    packed_a = int.from_bytes(
        b"".join(v.to_bytes(nbytes, "little") for v in ap), "little")
    packed_b = int.from_bytes(
        b"".join(v.to_bytes(nbytes, "little") for v in bp), "little")
    raw = (packed_a * packed_b).to_bytes(nbytes * (m + n), "little")
    out = [int.from_bytes(raw[k * nbytes:(k + 1) * nbytes], "little")
           for k in range(out_len)]
    if cb:
        wa = _window_sums(ap, n, out_len)
        for k in range(out_len):
            out[k] -= cb * wa[k]
    if ca:
        wb = _window_sums(bp, m, out_len)
        for k in range(out_len):
            out[k] -= ca * wb[k]
    if ca and cb:
        for k in range(out_len):
            out[k] += ca * cb * (min(k, m - 1, n - 1, out_len - 1 - k) + 1)
    return tuple(out)


def _poly_mul(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    a = _trim(a)
    b = _trim(b)
    if a == (0,) or b == (0,):
        return (0,)
    if min(len(a), len(b)) <= _SCHOOLBOOK_MAX:
        if len(a) > len(b):
            a, b = b, a
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return tuple(out)
    return _kronecker_mul(a, b)


def _poly_divmod(num: Sequence[int], den: Sequence[int]):
    # schoolbook long division; denominator must be monic
    num = list(_trim(num))
    den = _trim(den)
    assert den[-1] == 1
    dd = len(den) - 1
    q = [0] * max(1, len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c == 0:
            continue
        q[i - dd] = c
        for j, dj in enumerate(den):
            num[i - dd + j] -= c * dj
    return tuple(q), _trim(num)


def _substitute_power(f: Sequence[int], k: int) -> tuple[int, ...]:
    out = [0] * ((len(f) - 1) * k + 1)
    for i, c in enumerate(f):
        out[i * k] = c
    return tuple(out)


@lru_cache(maxsize=None)
def cyclotomic_poly(M: int) -> tuple[int, ...]:
    """Coefficients of Phi_M, ascending degree."""
    assert M >= 1
    if M == 1:
        return (-1, 1)
    fac = factorize(M)
    rad = 1
    for p, _ in fac:
        rad *= p
    if rad != M:
        return _substitute_power(cyclotomic_poly(rad), M // rad)
    p = fac[-1][0]
    if M == p:
        return (1,) * p
    m = M // p
    base = cyclotomic_poly(m)
    q, r = _poly_divmod(_substitute_power(base, p), base)
    assert r == (0,)
    return q


def _series_inverse(f: Sequence[int], prec: int) -> tuple[int, ...]:
    # Newton iteration for 1/f mod x^prec; needs f[0] == 1
    assert f[0] == 1
    g: tuple[int, ...] = (1,)
    cur = 1
    while cur < prec:
        cur = min(2 * cur, prec)
        fg = _poly_mul(tuple(f[:cur]), g)[:cur]
        e = [-c for c in fg]
        e[0] += 2
        g = _poly_mul(g, tuple(e))[:cur]
    return tuple(g[:prec])


@lru_cache(maxsize=None)
def _barrett_inv(M: int) -> tuple[int, ...]:
    n = euler_phi(M)
    return _series_inverse(tuple(reversed(cyclotomic_poly(M))), n + 1)


def _barrett_reduce(f: Sequence[int], M: int) -> tuple[int, ...]:
    # remainder of f mod Phi_M for deg f <= 2*phi(M) - 1
    n = euler_phi(M)
    f = _trim(f)
    d = len(f) - 1
    if d < n:
        return f + (0,) * (n - len(f))
    assert d <= 2 * n - 1
    qlen = d - n + 1
    frev = tuple(reversed(f))
    qrev = _poly_mul(frev[:qlen], _barrett_inv(M)[:qlen])[:qlen]
    qrev = tuple(qrev) + (0,) * (qlen - len(qrev))
    prod = _poly_mul(tuple(reversed(qrev)), cyclotomic_poly(M))
    out = [f[i] - (prod[i] if i < len(prod) else 0) for i in range(n)]
    for i in range(n, d + 1):
        assert f[i] == (prod[i] if i < len(prod) else 0)
    return tuple(out)


@lru_cache(maxsize=None)
def _chunk_shift_tables(M: int, count: int) -> tuple[tuple[int, ...], ...]:
    # T_j = x^{j*phi(M)} mod Phi_M
    n = euler_phi(M)
    tabs = [(1,) + (0,) * (n - 1)]
    while len(tabs) < count:
        tabs.append(_barrett_reduce((0,) * n + _trim(tabs[-1]), M))
    return tuple(tabs)


def reduce_mod_cyclotomic(coeffs: Sequence[int], M: int) -> tuple[int, ...]:
    """Reduce an integer polynomial of any degree mod Phi_M.

    Returns exactly phi(M) coefficients.  Long inputs are folded with cached
    tables of x^{j*phi(M)} mod Phi_M so only short products ever occur.
    """
    n = euler_phi(M)
    c = _trim(coeffs)
    if len(c) <= 2 * n:
        return _barrett_reduce(c, M)
    nchunks = (len(c) + n - 1) // n
    tabs = _chunk_shift_tables(M, nchunks)
    acc = list(c[:n]) + [0] * (n - 1)
    for j in range(1, nchunks):
        chunk = _trim(c[j * n:(j + 1) * n])
        if chunk == (0,):
            continue
        for i, v in enumerate(_poly_mul(chunk, tabs[j])):
            acc[i] += v
    return _barrett_reduce(acc, M)


# ------------------------------------------------------------------- values


@dataclass(frozen=True)
class CycloValue:
    """An element of Z[zeta_order] in reduced power-basis coordinates.

    Construct through root / from_int / from_root_counts rather than directly.
    Rational integers are always stored at order 1, so ``v.order == 1`` is the
    reliable rationality test.  Equal values may still be stored at different
    orders (e.g. zeta_3 built at order 6); __eq__ and __hash__ account for it.
    """

    order: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        assert self.order >= 1 and len(self.coeffs) == euler_phi(self.order)

    # --- predicates

    def is_zero(self) -> bool:
        return self.order == 1 and self.coeffs[0] == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_rational_integer(self) -> bool:
        return self.order == 1

    def as_int(self) -> int:
        if self.order != 1:
            raise ValueError("value is not a rational integer")
        return self.coeffs[0]

    # --- representation changes

    def at_order(self, M2: int) -> "CycloValue":
        """Re-express at a multiple of the current order (no shrinking)."""
        assert M2 % self.order == 0
        if M2 == self.order:
            return self
        return CycloValue(M2, _lift_coeffs(self, M2))

    def galois(self, a: int) -> "CycloValue":
        """Apply the automorphism zeta -> zeta^a; a must be coprime to order."""
        M = self.order
        if M == 1:
            return self
        assert math.gcd(a, M) == 1
        vec = [0] * M
        for i, c in enumerate(self.coeffs):
            if c:
                vec[(i * a) % M] += c
        return _make(M, reduce_mod_cyclotomic(vec, M))

    def conjugate(self) -> "CycloValue":
        return self.galois(self.order - 1) if self.order > 1 else self

    def abs_squared(self) -> int | None:
        """v * conj(v) when that is a rational integer, else None."""
        z = self * self.conjugate()
        return z.coeffs[0] if z.order == 1 else None

    # --- ring operations

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.order == other.order:
            return _make(self.order, tuple(
                x + y for x, y in zip(self.coeffs, other.coeffs)))
        L = math.lcm(self.order, other.order)
        a = _lift_coeffs(self, L)
        b = _lift_coeffs(other, L)
        return _make(L, tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return CycloValue(self.order, tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.order == 1:
            c = self.coeffs[0]
            return _make(other.order, tuple(c * y for y in other.coeffs))
        if other.order == 1:
            c = other.coeffs[0]
            return _make(self.order, tuple(c * y for y in self.coeffs))
        L = math.lcm(self.order, other.order)
        a = _lift_coeffs(self, L)
        b = _lift_coeffs(other, L)
        return _make(L, reduce_mod_cyclotomic(_poly_mul(a, b), L))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = from_int(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # --- comparison; equal values can sit at different stored orders

    def __eq__(self, other):
        if isinstance(other, int):
            return self.order == 1 and self.coeffs[0] == other
        if not isinstance(other, CycloValue):
            return NotImplemented
        if self.order == other.order:
            return self.coeffs == other.coeffs
        L = math.lcm(self.order, other.order)
        return _lift_coeffs(self, L) == _lift_coeffs(other, L)

    def __hash__(self):
        # normalized trace to Q is invariant under re-expression, and for
        # rational integers it agrees with hash(int)
        tab = _trace_table(self.order)
        tr = sum(c * t for c, t in zip(self.coeffs, tab))
        return hash(Fraction(tr, len(self.coeffs)))

    def __repr__(self):
        return f"CycloValue(order={self.order}, coeffs={self.coeffs})"


def _coerce(x) -> "CycloValue":
    if isinstance(x, CycloValue):
        return x
    if isinstance(x, int):
        return CycloValue(1, (x,))
    return NotImplemented


def _make(order: int, reduced: Sequence[int]) -> CycloValue:
    if order > 1 and not any(reduced[1:]):
        return CycloValue(1, (reduced[0],))
    return CycloValue(order, tuple(reduced))


def _lift_coeffs(v: CycloValue, M2: int) -> tuple[int, ...]:
    # power-basis coefficients of v inside Q(zeta_M2)
    if v.order == M2:
        return v.coeffs
    k = M2 // v.order
    vec = [0] * ((len(v.coeffs) - 1) * k + 1)
    for i, c in enumerate(v.coeffs):
        if c:
            vec[i * k] = c
    return reduce_mod_cyclotomic(vec, M2)


@lru_cache(maxsize=None)
def _trace_table(M: int) -> tuple[int, ...]:
    # Tr_{Q(zeta_M)/Q}(zeta_M^i) for i < phi(M)
    n = euler_phi(M)
    out = []
    for i in range(n):
        d = M // math.gcd(i, M)
        out.append(moebius(d) * (n // euler_phi(d)))
    return tuple(out)


# ------------------------------------------------------------- constructors


def from_int(n: int) -> CycloValue:
    return CycloValue(1, (n,))


def root(M: int, k: int = 1) -> CycloValue:
    """zeta_M^k."""
    return from_root_counts(M, {k % M: 1})


def from_root_counts(M: int, counts: Union[Mapping[int, int], Sequence[int]]
                     ) -> CycloValue:
    """Sum of c_e * zeta_M^e over the given exponent multiplicities.

    The order is shrunk by the gcd of the live exponents with M before
    reduction, so sums supported on a subring come back at small order.
    """
    assert M >= 1
    items = counts.items() if isinstance(counts, Mapping) else enumerate(counts)
    agg: dict[int, int] = {}
    for e, c in items:
        if c:
            k = e % M
            agg[k] = agg.get(k, 0) + c
    agg = {e: c for e, c in agg.items() if c}
    if not agg:
        return CycloValue(1, (0,))
    g = M
    for e in agg:
        g = math.gcd(g, e)
    M2 = M // g
    vec = [0] * (max(e // g for e in agg) + 1)
    for e, c in agg.items():
        vec[e // g] = c
    return _make(M2, reduce_mod_cyclotomic(vec, M2))


# ------------------------------------------------------------------ ratios


def _exact_log(r: int, q: int) -> int | None:
    if r < 1:
        return None
    m = 0
    while r > 1:
        if r % q:
            return None
        r //= q
        m += 1
    return m


def q_power_ratio(v: CycloValue, w: CycloValue, q: int) -> int | None:
    """The integer m with v == q^m * w, or None if no such m exists.

    Works in power-basis coordinates at a common order: v = q^m * w holds
    exactly when the coefficient vectors are proportional by q^m.
    """
    assert q >= 2
    if v.is_zero() and w.is_zero():
        return 0
    if v.is_zero() or w.is_zero():
        return None
    L = math.lcm(v.order, w.order)
    a = _lift_coeffs(v, L)
    b = _lift_coeffs(w, L)
    idx = next(i for i in range(len(a)) if a[i] or b[i])
    if a[idx] == 0 or b[idx] == 0:
        return None
    ratio = Fraction(a[idx], b[idx])
    if ratio <= 0:
        return None
    num, den = ratio.numerator, ratio.denominator
    if den == 1:
        m = _exact_log(num, q)
    elif num == 1:
        k = _exact_log(den, q)
        m = -k if k is not None else None
    else:
        return None
    if m is None:
        return None
    if all(ai * den == bi * num for ai, bi in zip(a, b)):
        return m
    return None

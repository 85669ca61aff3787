"""Multiplicative and additive characters of finite fields and Gauss sums.

Characters at degree d are indexed against the tower's compatible generator:
chi_j(g^i) = zeta_{q^d-1}^{j*i}, and chi(0) = 0 for every chi, including the
trivial one.  The additive character is x -> zeta_p^{AbsTr(c*x)} for a fixed
nonzero twist c in the base field, embedded upward, so the degree-d additive
character is the base one composed with the relative trace.

Gauss sums are accumulated as exact root-count vectors at order
M = (q^d - 1) * p using zeta_{q^d-1} = zeta_M^p and zeta_p = zeta_M^{q^d-1},
then reduced; the gcd shrink in from_root_counts keeps lifted-character sums
in small rings.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from charsum.cyclotomic import CycloValue, from_int, from_root_counts, root
from charsum.errors import SchemaError
from charsum.field_tower import FieldTower


@dataclass(frozen=True)
class MultCharacter:
    degree: int
    index: int


class CharSystem:
    def __init__(self, tower: FieldTower, c: int = 1):
        if not (0 < c < tower.q):
            raise SchemaError(f"additive twist {c} is not a nonzero base field element")
        self.tower = tower
        self.c = c
        self._twists: dict[int, int] = {}
        self._gauss_cache: dict[tuple[int, int], CycloValue] = {}
        self._product_cache: dict[tuple[int, tuple[int, ...]], CycloValue] = {}

    # ---- the character group at each degree

    def character(self, degree: int, index: int) -> MultCharacter:
        n = self.tower.group_order(degree)
        return MultCharacter(degree, index % n)

    def trivial(self, degree: int) -> MultCharacter:
        return MultCharacter(degree, 0)

    def char_of_order(self, degree: int, n: int, power: int = 1) -> MultCharacter:
        nd = self.tower.group_order(degree)
        if n < 1 or nd % n:
            raise SchemaError(f"no character of order {n} at degree {degree}")
        return self.character(degree, (nd // n) * power)

    def char_mul(self, a: MultCharacter, b: MultCharacter) -> MultCharacter:
        assert a.degree == b.degree
        return self.character(a.degree, a.index + b.index)

    def char_pow(self, a: MultCharacter, k: int) -> MultCharacter:
        return self.character(a.degree, a.index * k)

    def char_inv(self, a: MultCharacter) -> MultCharacter:
        return self.char_pow(a, -1)

    def is_trivial(self, a: MultCharacter) -> bool:
        return a.index == 0

    def char_order(self, a: MultCharacter) -> int:
        n = self.tower.group_order(a.degree)
        return n // math.gcd(a.index, n)

    def lift_character(self, chi: MultCharacter, d: int) -> MultCharacter:
        """chi composed with the norm from degree d down to chi.degree."""
        e = chi.degree
        assert d % e == 0
        scale = self.tower.group_order(d) // self.tower.group_order(e)
        return self.character(d, chi.index * scale)

    def char_point(self, chi: MultCharacter) -> Fraction:
        return Fraction(chi.index, self.tower.group_order(chi.degree))

    def char_from_point(self, degree: int, point: Fraction) -> MultCharacter:
        pt = point - math.floor(point)
        num = pt * self.tower.group_order(degree)
        if num.denominator != 1:
            raise SchemaError(f"{point} is not a character point at degree {degree}")
        return self.character(degree, int(num))

    # ---- values

    def char_value(self, chi: MultCharacter, x: int) -> CycloValue:
        if x == 0:
            return from_int(0)
        n = self.tower.group_order(chi.degree)
        return root(n, chi.index * self.tower.log(chi.degree, x))

    def _twist_at(self, d: int) -> int:
        cd = self._twists.get(d)
        if cd is None:
            cd = self.tower.embed(1, d, self.c)
            self._twists[d] = cd
        return cd

    def psi_value(self, d: int, x: int) -> CycloValue:
        t = self.tower
        tr = t.absolute_trace_table(d)
        return root(t.p, tr[t.mul(d, self._twist_at(d), x)])

    # ---- Gauss sums

    def gauss_sum(self, chi: MultCharacter) -> CycloValue:
        key = (chi.degree, chi.index)
        val = self._gauss_cache.get(key)
        if val is not None:
            return val
        d = chi.degree
        t = self.tower
        n = t.group_order(d)
        p = t.p
        M = n * p
        tr = t.absolute_trace_table(d)
        g = t.generator(d)
        counts = [0] * M
        idx = chi.index
        y = self._twist_at(d)
        a = 0
        for _ in range(n):
            counts[(a * p + tr[y] * n) % M] += 1
            y = t.mul(d, y, g)
            a += idx
            if a >= n:
                a -= n
        val = from_root_counts(M, counts)
        self._gauss_cache[key] = val
        return val

    def conj_gauss_sum(self, chi: MultCharacter) -> CycloValue:
        # conj(g(chi)) = chi(-1) * g(chi^{-1}); avoids conjugating a big value
        t = self.tower
        sign = self.char_value(chi, t.minus_one())
        return sign * self.gauss_sum(self.char_inv(chi))

    def product_of_gauss(self, degree: int, indices) -> CycloValue:
        n = self.tower.group_order(degree)
        key = (degree, tuple(sorted(i % n for i in indices)))
        val = self._product_cache.get(key)
        if val is None:
            val = from_int(1)
            for i in key[1]:
                val = val * self.gauss_sum(MultCharacter(degree, i))
            self._product_cache[key] = val
        return val

    # ---- Kloosterman sums

    def kloosterman(self, degree: int, chars, t_code: int) -> CycloValue:
        """Sum of psi(x_1+...+x_k) chi_1(x_1)...chi_k(x_k) over x_1*...*x_k = t."""
        if t_code == 0:
            raise SchemaError("kloosterman point must be nonzero")
        d = degree
        t = self.tower
        n = t.group_order(d)
        p = t.p
        M = n * p
        tr = t.absolute_trace_table(d)
        cd = self._twist_at(d)
        idxs = [c.index for c in chars]
        assert idxs and all(c.degree == d for c in chars)
        lt = t.log(d, t_code)
        counts = [0] * M
        for ees in itertools.product(range(n), repeat=len(idxs) - 1):
            e_last = (lt - sum(ees)) % n
            a = (idxs[-1] * e_last) % n
            x_sum = t.exp(d, e_last)
            for idx_i, e_i in zip(idxs, ees):
                a = (a + idx_i * e_i) % n
                x_sum = t.add(d, x_sum, t.exp(d, e_i))
            counts[(a * p + tr[t.mul(d, cd, x_sum)] * n) % M] += 1
        return from_root_counts(M, counts)

    # ---- lifting and multiplication laws for Gauss sums

    def check_hd_lift(self, chi: MultCharacter, d: int) -> bool:
        """-g(chi o Nm) == (-g(chi))^{d/e} for the degree-d lift of chi."""
        e = chi.degree
        assert d % e == 0
        lhs = -self.gauss_sum(self.lift_character(chi, d))
        rhs = (-self.gauss_sum(chi)) ** (d // e)
        return lhs == rhs

    def check_hd_product(self, lam: MultCharacter, n: int) -> bool:
        """g(lam^n) prod g(eps^i) == lam(n^n) prod g(lam eps^i), eps of order n."""
        d = lam.degree
        t = self.tower
        nd = t.group_order(d)
        if n < 1 or nd % n:
            raise SchemaError(f"order {n} does not divide {nd}")
        step = nd // n
        lhs = self.gauss_sum(self.char_pow(lam, n))
        for i in range(1, n):
            lhs = lhs * self.gauss_sum(self.character(d, step * i))
        nn = t.pow_elem(d, t.from_int(n), n)
        rhs = self.char_value(lam, nn)
        for i in range(n):
            rhs = rhs * self.gauss_sum(self.character(d, lam.index + step * i))
        return lhs == rhs

"""Exact finite Fourier analysis for monomial sum data.

Grid functions on F_{q^d}^k with cyclotomic-integer values, the naive
(exact) Fourier transform, the twisted monomial sums

    I^{n_1..n_k}_{lam_1..lam_k}(a)
        = sum over (x_i) in (F_{q^d}^*)^k of psi(a prod x_i^{n_i}) prod lam_i(x_i),

and the solver that produces, for a monomial datum with exponent sum 2 or 0,
the matching transformed datum (W, eta, b) together with the exact constant c.
Everything is integer arithmetic in cyclotomic fields; nothing is floated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import cyclotomic as cy
from .characters import CharSystem, MultCharacter
from .cyclotomic import CycloValue
from .divisor_calc import Divisor, divisor_of_char_power, frac_mod1
from .errors import InternalCheckError, SchemaError, SizeBoundError

DEFAULT_TERM_BOUND = 1 << 26


@dataclass(frozen=True)
class MonomialDatum:
    """Exponents n_i, characters chi_i and a coefficient a over F_{q^degree}.

    The datum stands for the function psi(a prod x_i^{n_i}) prod chi_i(x_i)
    on the torus (F_{q^degree}^*)^k.  Exponents must be nonzero; arithmetic
    constraints involving p are checked against a concrete CharSystem by
    check_monomial_datum.
    """

    degree: int
    exponents: tuple
    characters: tuple
    a: int

    def __init__(self, degree, exponents, characters, a):
        object.__setattr__(self, "degree", int(degree))
        object.__setattr__(self, "exponents", tuple(int(n) for n in exponents))
        object.__setattr__(self, "characters", tuple(characters))
        object.__setattr__(self, "a", int(a))

    @property
    def k(self):
        return len(self.exponents)


def check_monomial_datum(system: CharSystem, datum: MonomialDatum):
    t = system.tower
    if datum.degree not in t.degrees():
        raise SchemaError(f"degree {datum.degree} outside the configured tower")
    if len(datum.characters) != len(datum.exponents):
        raise SchemaError("exponent and character lists differ in length")
    for n in datum.exponents:
        if n == 0:
            raise SchemaError("zero exponent in monomial datum")
        if math.gcd(n, t.p) != 1:
            raise SchemaError(f"exponent {n} shares a factor with p={t.p}")
    for chi in datum.characters:
        if chi.degree != datum.degree:
            raise SchemaError("character degree differs from the datum degree")
    if not (0 < datum.a < t.order(datum.degree)):
        raise SchemaError("coefficient must be a nonzero field element")


def lift_datum(system: CharSystem, datum: MonomialDatum, e: int) -> MonomialDatum:
    """Base change by the degree-e extension: chi o Nm, same a, same exponents."""
    d = datum.degree
    lifted = tuple(system.lift_character(chi, d * e) for chi in datum.characters)
    a = system.tower.embed(d, d * e, datum.a)
    return MonomialDatum(d * e, datum.exponents, lifted, a)


# ---------------------------------------------------------------- grids


class GridFunction:
    """Dense function F_{q^degree}^k -> CycloValue, little-endian indexed."""

    __slots__ = ("tower", "degree", "k", "values", "_q")

    def __init__(self, tower, degree, k, values):
        self.tower = tower
        self.degree = degree
        self.k = k
        self._q = tower.order(degree)
        self.values = tuple(values)
        if len(self.values) != self._q ** k:
            raise SchemaError(
                f"grid needs {self._q ** k} values, got {len(self.values)}")

    @classmethod
    def build(cls, tower, degree, k, fn):
        q = tower.order(degree)
        vals = []
        for idx in range(q ** k):
            vals.append(fn(cls._codes_static(idx, q, k)))
        return cls(tower, degree, k, vals)

    @staticmethod
    def _codes_static(index, q, k):
        out = []
        for _ in range(k):
            index, c = divmod(index, q)
            out.append(c)
        return tuple(out)

    def codes(self, index):
        return self._codes_static(index, self._q, self.k)

    def index(self, codes):
        idx = 0
        for c in reversed(codes):
            idx = idx * self._q + c
        return idx

    def value(self, codes):
        return self.values[self.index(codes)]

    def scaled(self, c) -> "GridFunction":
        return GridFunction(self.tower, self.degree, self.k,
                            (v * c for v in self.values))

    def rescale_args(self, factors) -> "GridFunction":
        """g with g(x_1..x_k) = f(u_1 x_1, .., u_k x_k)."""
        if len(factors) != self.k or any(u == 0 for u in factors):
            raise SchemaError("need one nonzero scale factor per coordinate")
        t, d = self.tower, self.degree
        vals = []
        for idx in range(len(self.values)):
            c = self.codes(idx)
            vals.append(self.value(tuple(
                t.mul(d, u, x) for u, x in zip(factors, c))))
        return GridFunction(t, d, self.k, vals)

    def negated_args(self) -> "GridFunction":
        m1 = self.tower.embed(1, self.degree, self.tower.minus_one())
        return self.rescale_args((m1,) * self.k)

    def __eq__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        return (self.degree == other.degree and self.k == other.k
                and all(a == b for a, b in zip(self.values, other.values)))

    def __hash__(self):
        return hash((self.degree, self.k, self.values))

    def __repr__(self):
        return f"GridFunction(degree={self.degree}, k={self.k}, q={self._q})"


def fourier_transform(system: CharSystem, f: GridFunction, *,
                      max_terms: int = DEFAULT_TERM_BOUND) -> GridFunction:
    """fhat(y) = sum_x f(x) psi(<y, x>), summed naively over the full grid."""
    t, d, k = f.tower, f.degree, f.k
    q = t.order(d)
    if q ** (2 * k) > max_terms:
        raise SizeBoundError(
            f"{q ** (2 * k)} transform terms exceed the bound {max_terms}")
    psi = [system.psi_value(d, x) for x in range(q)]
    points = [f.codes(i) for i in range(q ** k)]
    support = [(points[i], v) for i, v in enumerate(f.values) if not v.is_zero()]
    out = []
    for star in points:
        acc = cy.from_int(0)
        for xc, v in support:
            dot = 0
            for ys, xs in zip(star, xc):
                dot = t.add(d, dot, t.mul(d, ys, xs))
            acc = acc + v * psi[dot]
        out.append(acc)
    return GridFunction(t, d, k, out)


def inner(f: GridFunction, g: GridFunction) -> CycloValue:
    """(f, g) = sum_x f(x) conj(g(x)); conjugate-linear in g."""
    if f.degree != g.degree or f.k != g.k:
        raise SchemaError("inner product needs functions on the same grid")
    acc = cy.from_int(0)
    for a, b in zip(f.values, g.values):
        if not (a.is_zero() or b.is_zero()):
            acc = acc + a * b.conjugate()
    return acc


# ---------------------------------------------------------------- I-sums


def _i_sum_raw(system, degree, exponents, a, lams, method):
    t = system.tower
    grp = t.group_order(degree)
    p = t.p
    k = len(exponents)
    if len(lams) != k:
        raise SchemaError("need one twisting character per coordinate")
    for lam in lams:
        if lam.degree != degree:
            raise SchemaError("twisting character at the wrong degree")
    if method == "direct":
        order = grp * p
        tr = t.absolute_trace_table(degree)
        twist = t.mul(degree, system._twist_at(degree), a)
        tr_a = [tr[t.mul(degree, twist, t.exp(degree, e))] for e in range(grp)]
        counts = [0] * order
        idxs = [lam.index for lam in lams]
        for etup in product(range(grp), repeat=k):
            mono = 0
            charge = 0
            for n, lidx, e in zip(exponents, idxs, etup):
                mono += n * e
                charge += lidx * e
            counts[((charge % grp) * p + tr_a[mono % grp] * grp) % order] += 1
        return cy.from_root_counts(order, counts)
    if method != "closed":
        raise SchemaError(f"unknown I-sum method {method!r}")
    if k == 0:
        return system.psi_value(degree, a)
    base = None
    for tt in range(grp):
        if all((n * tt - lam.index) % grp == 0
               for n, lam in zip(exponents, lams)):
            base = tt
            break
    if base is None:
        return cy.from_int(0)
    d0 = math.gcd(*[abs(n) for n in exponents])
    d1 = math.gcd(d0, grp)
    lam0 = system.character(degree, base)
    a_inv = t.inv(degree, a)
    total = cy.from_int(0)
    for j in range(d1):
        mu = system.char_mul(lam0, system.character(degree, j * (grp // d1)))
        total = total + system.gauss_sum(mu) * system.char_value(mu, a_inv)
    return total * (t.order(degree) - 1) ** (k - 1)


def i_sum_direct(system: CharSystem, datum: MonomialDatum, lams) -> CycloValue:
    """Brute-force I^{n_1..n_k}_{lam_1..lam_k}(a) over the torus."""
    check_monomial_datum(system, datum)
    return _i_sum_raw(system, datum.degree, datum.exponents, datum.a,
                      tuple(lams), "direct")


def i_sum_closed(system: CharSystem, datum: MonomialDatum, lams) -> CycloValue:
    """Closed form: 0 without a common root lam with lam_i = lam^{n_i}, else
    (q-1)^{k-1} sum over chi with chi^d = 1 of g(lam chi)(lam chi)(a^{-1})."""
    check_monomial_datum(system, datum)
    return _i_sum_raw(system, datum.degree, datum.exponents, datum.a,
                      tuple(lams), "closed")


# ---------------------------------------------------------------- the solver


@dataclass(frozen=True)
class TransformSolution:
    """Transformed datum (exponents, characters, b) plus the constant c.

    case 1 covers exponent sum 2 (exponents kept), case 2 covers exponent
    sum 0 (exponents negated).  chi is the mediating character, stored at
    the smallest tower degree that realizes its point; twist is the integer
    m with 2m + 1 = #trivial among {chi, chi_1, .., chi_k}.
    """

    case: int
    exponents: tuple
    characters: tuple
    chi: MultCharacter
    b: int
    c: CycloValue
    twist: int


def _single_point(div: Divisor):
    recs = div.records()
    if len(recs) != 1 or recs[0]["mult"] != 1:
        return None
    return Fraction(recs[0]["num"], recs[0]["den"])


def _minimal_degree(system, degree, den):
    t = system.tower
    for dm in range(1, degree + 1):
        if degree % dm == 0 and (t.p ** (t.s * dm) - 1) % den == 0:
            return dm
    raise SchemaError(f"no subfield of degree dividing {degree} carries "
                      f"a character point of denominator {den}")


def solve_monomial_transform(system: CharSystem,
                             datum: MonomialDatum) -> TransformSolution:
    """Solve the two divisor equations for the mediating character chi and
    assemble the transformed datum and its constant.

    The equation (0) +/- (point of chi^{-1}) = sum_i D_{chi_i^{-1}, n_i}
    pins the point of chi uniquely, so there is exactly one candidate
    solution; failure modes are all explicit SchemaErrors.
    """
    check_monomial_datum(system, datum)
    t = system.tower
    d = datum.degree
    q = t.order(d)
    sigma = sum(datum.exponents)
    if sigma == 2:
        case = 1
    elif sigma == 0:
        case = 2
    else:
        raise SchemaError(f"exponent sum {sigma} admits no transform identity")
    g0 = math.gcd(*[abs(n) for n in datum.exponents]) if datum.exponents else 0
    if case == 1 and g0 == 2 and t.p == 2:
        raise SchemaError("exponent gcd 2 needs odd q")

    rhs = Divisor()
    for chi, n in zip(datum.characters, datum.exponents):
        pt = system.char_point(system.char_inv(chi))
        rhs = rhs + divisor_of_char_power(pt, n)
    origin = Divisor({Fraction(0): 1})
    rest = rhs - origin if case == 1 else origin - rhs
    r = _single_point(rest)
    if r is None:
        raise SchemaError("divisor equation has no mediating character")
    if case == 1 and g0 == 2 and r != Fraction(1, 2):
        raise SchemaError("exponent gcd 2 requires the order-2 character")
    if case == 2 and g0 > 1 and r != 0:
        raise SchemaError("exponent gcd > 1 requires a trivial mediating character")
    if (q - 1) % r.denominator:
        raise SchemaError(f"mediating point {r} is not realized over F_{q}")

    chi_point = frac_mod1(-r)
    chi_min = system.char_from_point(
        _minimal_degree(system, d, max(1, chi_point.denominator)), chi_point)
    chi_d = system.lift_character(chi_min, d)

    v = t.from_int(1)
    for n in datum.exponents:
        v = t.mul(d, v, t.pow_elem(d, t.embed(1, d, t.from_int(n)), -n))
    if case == 1:
        b = t.mul(d, t.neg(d, v), t.inv(d, datum.a))
    else:
        b = t.mul(d, datum.a, t.inv(d, v))

    trivial = int(system.is_trivial(chi_d)) + sum(
        int(system.is_trivial(chi)) for chi in datum.characters)
    if trivial % 2 == 0:
        raise InternalCheckError(
            f"solution has {trivial} trivial characters; an odd count is forced")
    m = (trivial - 1) // 2

    if case == 1:
        head = -system.gauss_sum(system.char_inv(chi_d))
        argval = system.char_value(chi_d, t.neg(d, b))
        out_exponents = datum.exponents
    else:
        head = -system.gauss_sum(chi_d)
        argval = system.char_value(system.char_inv(chi_d), t.neg(d, b))
        out_exponents = tuple(-n for n in datum.exponents)
    c = head * argval * q ** m
    for chi in datum.characters:
        c = c * -system.gauss_sum(chi)
    norm = (c * c.conjugate()).as_int()
    if norm != q ** datum.k:
        raise InternalCheckError(f"|c|^2 = {norm} differs from q^k = {q ** datum.k}")

    eta = tuple(
        system.char_mul(system.char_pow(chi_d, n), system.char_inv(chi))
        for chi, n in zip(datum.characters, datum.exponents))
    return TransformSolution(case, out_exponents, eta, chi_min, b, c, m)


def solve_all_monomial_transforms(system, datum):
    """All mediating characters; the divisor equation makes this a 1-tuple."""
    return (solve_monomial_transform(system, datum),)


# ------------------------------------------------------- identity checks


def verify_twisted_moments(system, datum, solution, lams, *,
                           method="closed") -> bool:
    """Check (-q)^k I^{n..}_{chi_i/lam_i}(a) = c prod conj(g(lam_i)) I^{m..}_{eta_i lam_i}(b)."""
    check_monomial_datum(system, datum)
    lams = tuple(lams)
    d = datum.degree
    q = system.tower.order(d)
    if any(system.is_trivial(lam) for lam in lams):
        raise SchemaError("twisting characters must all be nontrivial")
    lhs_chars = tuple(system.char_mul(chi, system.char_inv(lam))
                      for chi, lam in zip(datum.characters, lams))
    lhs = cy.from_int(-q) ** datum.k * _i_sum_raw(
        system, d, datum.exponents, datum.a, lhs_chars, method)
    rhs_chars = tuple(system.char_mul(eta, lam)
                      for eta, lam in zip(solution.characters, lams))
    rhs = solution.c * _i_sum_raw(
        system, d, solution.exponents, solution.b, rhs_chars, method)
    for lam in lams:
        rhs = rhs * system.gauss_sum(lam).conjugate()
    return lhs == rhs


def sweep_twisted_moments(system, datum, *, depth=2, method="closed"):
    """Run verify_twisted_moments over every nontrivial tuple at each
    extension degree e <= depth; the report counts nonvanishing tuples."""
    check_monomial_datum(system, datum)
    report = {"depth": depth, "checked": 0, "nonvanishing": 0,
              "failures": [], "truncated_at_depth": depth}
    for e in range(1, depth + 1):
        datum_e = lift_datum(system, datum, e)
        sol_e = solve_monomial_transform(system, datum_e)
        de = datum_e.degree
        grp = system.tower.group_order(de)
        q_e = system.tower.order(de)
        nontrivial = [system.character(de, i) for i in range(1, grp)]
        for lams in product(nontrivial, repeat=datum.k):
            lhs_chars = tuple(system.char_mul(chi, system.char_inv(lam))
                              for chi, lam in zip(datum_e.characters, lams))
            lhs = cy.from_int(-q_e) ** datum.k * _i_sum_raw(
                system, de, datum_e.exponents, datum_e.a, lhs_chars, method)
            rhs_chars = tuple(system.char_mul(eta, lam)
                              for eta, lam in zip(sol_e.characters, lams))
            rhs = sol_e.c * _i_sum_raw(
                system, de, sol_e.exponents, sol_e.b, rhs_chars, method)
            for lam in lams:
                rhs = rhs * system.gauss_sum(lam).conjugate()
            report["checked"] += 1
            if lhs != rhs:
                report["failures"].append(
                    {"degree": de, "lams": [lam.index for lam in lams]})
            elif not lhs.is_zero():
                report["nonvanishing"] += 1
    report["pass"] = not report["failures"] and report["nonvanishing"] > 0
    return report


def verify_transform_pointwise(system, datum, solution=None, *, target=None,
                               scalar=None, arg_scale=None,
                               max_terms=DEFAULT_TERM_BOUND) -> bool:
    """Check fhat = (-1)^k c f' at every grid point, f and f' being the
    full trace functions of the datum and of its transformed partner.

    An explicit (target, scalar, arg_scale) triple replaces the solver
    route; that path expresses fixtures whose b sits in the other square
    class of the same coefficient locus.
    """
    from .stalk_traces import gm_trace_function

    check_monomial_datum(system, datum)
    f = gm_trace_function(system, datum)
    fhat = fourier_transform(system, f, max_terms=max_terms)
    if target is None:
        if solution is None:
            solution = solve_monomial_transform(system, datum)
        target = MonomialDatum(datum.degree, solution.exponents,
                               solution.characters, solution.b)
        scalar = solution.c if datum.k % 2 == 0 else -solution.c
    elif scalar is None:
        raise SchemaError("an explicit target needs an explicit scalar")
    f2 = gm_trace_function(system, target)
    if arg_scale is not None:
        f2 = f2.rescale_args(arg_scale)
    return fhat == f2.scaled(scalar)


def verify_ratio_transform(system, a, xhat, yhat, chi) -> bool:
    """Check sum over (x,y) in (F_q^*)^2 of psi(a x/y + x xhat + y yhat) chi(x/y)
    against q psi(-a yhat/xhat) chi(-yhat/xhat) - g(chi) chi^{-1}(a)."""
    d = chi.degree
    t = system.tower
    if 0 in (a, xhat, yhat):
        raise SchemaError("a, xhat, yhat must be nonzero")
    lhs = cy.from_int(0)
    grp = t.group_order(d)
    for i in range(grp):
        x = t.exp(d, i)
        for j in range(grp):
            y = t.exp(d, j)
            ratio = t.mul(d, x, t.inv(d, y))
            arg = t.add(d, t.mul(d, a, ratio),
                        t.add(d, t.mul(d, x, xhat), t.mul(d, y, yhat)))
            lhs = lhs + system.psi_value(d, arg) * system.char_value(chi, ratio)
    w = t.neg(d, t.mul(d, yhat, t.inv(d, xhat)))
    rhs = (t.order(d) * system.psi_value(d, t.mul(d, a, w))
           * system.char_value(chi, w)
           - system.gauss_sum(chi)
           * system.char_value(system.char_inv(chi), a))
    return lhs == rhs


def verify_ratio_transform_nfold(system, n, chi, xhat, yhat) -> bool:
    """n-fold version: the same shape with x/y replaced by prod x_m / prod y_m
    and the Gauss term weighted by 1 + q + .. + q^{n-1}."""
    d = chi.degree
    t = system.tower
    xhat, yhat = tuple(xhat), tuple(yhat)
    if len(xhat) != n or len(yhat) != n or 0 in xhat or 0 in yhat:
        raise SchemaError(f"need {n} nonzero components on each side")
    q = t.order(d)
    grp = t.group_order(d)
    units = [t.exp(d, i) for i in range(grp)]
    lhs = cy.from_int(0)
    for xs in product(units, repeat=n):
        for ys in product(units, repeat=n):
            num, den, lin = t.from_int(1), t.from_int(1), 0
            for x, xh, y, yh in zip(xs, xhat, ys, yhat):
                num = t.mul(d, num, x)
                den = t.mul(d, den, y)
                lin = t.add(d, lin, t.add(d, t.mul(d, x, xh), t.mul(d, y, yh)))
            ratio = t.mul(d, num, t.inv(d, den))
            lhs = lhs + (system.psi_value(d, t.add(d, ratio, lin))
                         * system.char_value(chi, ratio))
    w = t.from_int(1)
    for xh, yh in zip(xhat, yhat):
        w = t.mul(d, w, t.mul(d, yh, t.inv(d, xh)))
    if n % 2:
        w = t.neg(d, w)
    geom = sum(q ** i for i in range(n))
    rhs = (q ** n * system.psi_value(d, w) * system.char_value(chi, w)
           - geom * system.gauss_sum(chi))
    return lhs == rhs

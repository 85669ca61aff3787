"""Norm-form layer: etale algebras over a base field in the tower.

An EtaleAlgebra is a product of tower fields F_{q^{D_i}} viewed over the
base F_{q^e} (e = base_degree, e | D_i).  A VirtualModule assigns an integer
rank n_i to each factor; attached to it are the determinant homomorphism

    det_V : k^* -> F_{q^e}^* : (x_i) |-> prod Nm(x_i)^{n_i},

the scale p(V) = prod n_i^{n_i d_i} (d_i = D_i/e), the index d(V) = gcd n_i,
and the weighted divisor sum_i d_i D_{chi_i, n_i}.  On top of that sit the
algebra Gauss-sum identity (verify_norm_identity), the determinant-twisted
sums I_{V,lam}(a) in direct and closed form, and the transform solver for
modules of rank 2 or 0 with its moment verifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from . import cyclotomic as cy
from .characters import CharSystem, MultCharacter
from .cyclotomic import CycloValue, q_power_ratio
from .divisor_calc import Divisor, divisor_of_char_power, frac_mod1
from .errors import InternalCheckError, SchemaError, SizeBoundError
from .monomial_fourier import DEFAULT_TERM_BOUND, MonomialDatum

__all__ = [
    "EtaleAlgebra", "VirtualModule", "NormCharacter", "NormSolution",
    "check_norm_data", "rk", "d_of", "p_of", "det_module", "module_divisor",
    "is_nondegenerate", "iter_nondegenerate", "gauss_sum_algebra",
    "verify_norm_identity", "i_norm_direct", "i_norm_closed",
    "solve_norm_transform", "verify_norm_moments", "sweep_norm_moments",
    "base_change", "extend_module", "extend_character", "extend_scalar",
    "divisor_descent_probe", "as_monomial_datum",
]


@dataclass(frozen=True)
class EtaleAlgebra:
    """Product of tower fields with degrees[i] viewed over F_{q^base_degree}."""

    tower: object
    degrees: tuple
    base_degree: int

    def __init__(self, tower, degrees, base_degree=1):
        degrees = tuple(int(d) for d in degrees)
        base_degree = int(base_degree)
        if not degrees:
            raise SchemaError("an etale algebra needs at least one factor")
        avail = tower.degrees()
        if base_degree not in avail:
            raise SchemaError(
                f"base degree {base_degree} outside the configured tower")
        for d in degrees:
            if d not in avail:
                raise SchemaError(f"degree {d} outside the configured tower")
            if d % base_degree:
                raise SchemaError(
                    f"factor degree {d} is not a multiple of the base "
                    f"degree {base_degree}")
        object.__setattr__(self, "tower", tower)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "base_degree", base_degree)

    @property
    def r(self):
        return len(self.degrees)

    def rel_degrees(self):
        """Factor degrees over the base field."""
        return tuple(d // self.base_degree for d in self.degrees)

    def dim(self):
        """Dimension of the algebra over its base field."""
        return sum(self.rel_degrees())


@dataclass(frozen=True)
class VirtualModule:
    """Integer rank per algebra factor; negative and zero ranks allowed."""

    ranks: tuple

    def __init__(self, ranks):
        object.__setattr__(self, "ranks", tuple(int(n) for n in ranks))


@dataclass(frozen=True)
class NormCharacter:
    """One multiplicative character per algebra factor."""

    chars: tuple

    def __init__(self, chars):
        object.__setattr__(self, "chars", tuple(chars))


def check_norm_data(system: CharSystem, algebra: EtaleAlgebra,
                    module: VirtualModule | None = None,
                    chi: NormCharacter | None = None,
                    a: int | None = None) -> None:
    if algebra.tower is not system.tower:
        raise SchemaError("algebra was built over a different tower")
    if module is not None and len(module.ranks) != algebra.r:
        raise SchemaError(
            f"{len(module.ranks)} ranks for {algebra.r} algebra factors")
    if chi is not None:
        if len(chi.chars) != algebra.r:
            raise SchemaError(
                f"{len(chi.chars)} characters for {algebra.r} algebra factors")
        for ch, d in zip(chi.chars, algebra.degrees):
            if ch.degree != d:
                raise SchemaError(
                    f"character of degree {ch.degree} on a factor of "
                    f"degree {d}")
    if a is not None:
        if not 0 < a < system.tower.order(algebra.base_degree):
            raise SchemaError(f"coefficient {a} is not a base-field unit")


def rk(algebra: EtaleAlgebra, module: VirtualModule) -> int:
    """Rank over the base field, sum n_i d_i."""
    return sum(n * d for n, d in zip(module.ranks, algebra.rel_degrees()))


def d_of(module: VirtualModule) -> int:
    """gcd of the ranks; 0 when the module is zero."""
    return math.gcd(*(abs(n) for n in module.ranks))


def _check_rank_coprimality(system: CharSystem, module: VirtualModule):
    p = system.tower.p
    for n in module.ranks:
        if n and math.gcd(n, p) != 1:
            raise SchemaError(
                f"rank {n} is not coprime to the characteristic {p}")


def p_of(system: CharSystem, algebra: EtaleAlgebra,
         module: VirtualModule) -> int:
    """The scale prod n_i^{n_i d_i} as a base-field unit; zero ranks
    contribute factor 1, negative exponents mean inversion."""
    check_norm_data(system, algebra, module)
    _check_rank_coprimality(system, module)
    t = system.tower
    e = algebra.base_degree
    out = t.embed(1, e, t.from_int(1))
    for n, d in zip(module.ranks, algebra.rel_degrees()):
        if n == 0:
            continue
        base = t.embed(1, e, t.from_int(n))
        out = t.mul(e, out, t.pow_elem(e, base, n * d))
    return out


def det_module(system: CharSystem, algebra: EtaleAlgebra,
               module: VirtualModule, x) -> int:
    """det_V(x) = prod Nm(x_i)^{n_i} in the base field; x must be a unit."""
    check_norm_data(system, algebra, module)
    x = tuple(x)
    if len(x) != algebra.r:
        raise SchemaError(f"{len(x)} coordinates for {algebra.r} factors")
    t = system.tower
    e = algebra.base_degree
    out = t.embed(1, e, t.from_int(1))
    for xi, n, deg in zip(x, module.ranks, algebra.degrees):
        if not 0 < xi < t.order(deg):
            raise SchemaError(f"coordinate {xi} is not a unit at degree {deg}")
        out = t.mul(e, out, t.pow_elem(e, t.norm_to(deg, e, xi), n))
    return out


def module_divisor(system: CharSystem, algebra: EtaleAlgebra,
                   chi: NormCharacter, module: VirtualModule) -> Divisor:
    """Weighted divisor sum_i d_i * (divisor of the n_i-th power points of
    chi_i); zero-rank factors contribute nothing."""
    check_norm_data(system, algebra, module, chi)
    _check_rank_coprimality(system, module)
    total = Divisor()
    for ch, n, d in zip(chi.chars, module.ranks, algebra.rel_degrees()):
        if n == 0:
            continue
        total = total + divisor_of_char_power(system.char_point(ch), n).scale(d)
    return total


def is_nondegenerate(system: CharSystem, chi: NormCharacter) -> bool:
    return all(not system.is_trivial(ch) for ch in chi.chars)


def iter_nondegenerate(system: CharSystem, algebra: EtaleAlgebra):
    """All non-degenerate characters of k^*, factor indices ascending."""
    t = system.tower
    pools = [[system.character(d, i) for i in range(1, t.group_order(d))]
             for d in algebra.degrees]
    for combo in product(*pools):
        yield NormCharacter(combo)


def gauss_sum_algebra(system: CharSystem, algebra: EtaleAlgebra,
                      chi: NormCharacter, *, method: str = "factor",
                      max_terms: int = DEFAULT_TERM_BOUND) -> CycloValue:
    """Gauss sum over k^* against psi of the trace to the base field.

    The factor method multiplies the per-factor Gauss sums; the direct
    method brute-forces the defining sum and exists as an oracle.
    """
    check_norm_data(system, algebra, chi=chi)
    if method == "factor":
        out = cy.from_int(1)
        for ch in chi.chars:
            out = out * system.gauss_sum(ch)
        return out
    if method != "direct":
        raise SchemaError(f"unknown method {method!r}")
    t = system.tower
    e = algebra.base_degree
    units = 1
    for d in algebra.degrees:
        units *= t.order(d) - 1
    if units > max_terms:
        raise SizeBoundError(f"{units} terms exceed the bound {max_terms}")
    pools = []
    for ch, d in zip(chi.chars, algebra.degrees):
        pools.append([(t.trace_to(d, e, x), system.char_value(ch, x))
                      for x in range(1, t.order(d))])
    total = cy.from_int(0)
    for combo in product(*pools):
        tr = 0
        val = cy.from_int(1)
        for tr_i, v_i in combo:
            tr = t.add(e, tr, tr_i)
            val = val * v_i
        total = total + system.psi_value(e, tr) * val
    return total


def verify_norm_identity(system: CharSystem, algebra: EtaleAlgebra,
                         module: VirtualModule, chi: NormCharacter,
                         lam: MultCharacter) -> int:
    """Exponent m with g((lam o det_V) chi) = q^m lam(p(V)) g(chi).

    q is the base field size.  Requires the module divisor of chi to
    vanish.  When every twisted factor character is nontrivial, checks
    2m = sum of d_i over the factors with chi_i trivial.
    """
    check_norm_data(system, algebra, module, chi)
    e = algebra.base_degree
    if lam.degree != e:
        raise SchemaError(
            f"twisting character of degree {lam.degree} on base degree {e}")
    if not module_divisor(system, algebra, chi, module).is_zero():
        raise SchemaError(
            "module carries a nonzero divisor; no identity is predicted")
    t = system.tower
    pv = p_of(system, algebra, module)
    lhs = cy.from_int(1)
    rhs = system.char_value(lam, pv)
    trivial_weight = 0
    twisted_trivial = 0
    for ch, n, deg, d in zip(chi.chars, module.ranks, algebra.degrees,
                             algebra.rel_degrees()):
        twisted = system.char_mul(
            system.lift_character(system.char_pow(lam, n), deg), ch)
        lhs = lhs * system.gauss_sum(twisted)
        rhs = rhs * system.gauss_sum(ch)
        trivial_weight += d * system.is_trivial(ch)
        twisted_trivial += system.is_trivial(twisted)
    m = q_power_ratio(lhs, rhs, t.order(e))
    if m is None:
        raise InternalCheckError(
            "zero-divisor module produced a non-power Gauss-sum ratio")
    if twisted_trivial == 0 and 2 * m != trivial_weight:
        raise InternalCheckError(
            f"parity clause fails: 2*{m} != {trivial_weight}")
    return m


# ------------------------------------------------- determinant-twisted sums


def i_norm_direct(system: CharSystem, algebra: EtaleAlgebra,
                  module: VirtualModule, lam: NormCharacter, a: int, *,
                  max_terms: int = DEFAULT_TERM_BOUND) -> CycloValue:
    """I_{V,lam}(a) = sum over x in k^* of psi(a det_V(x)) lam(x)."""
    check_norm_data(system, algebra, module, lam, a)
    _check_rank_coprimality(system, module)
    t = system.tower
    e = algebra.base_degree
    units = 1
    for d in algebra.degrees:
        units *= t.order(d) - 1
    if units > max_terms:
        raise SizeBoundError(f"{units} terms exceed the bound {max_terms}")
    pools = []
    for ch, n, deg in zip(lam.chars, module.ranks, algebra.degrees):
        pools.append([(t.pow_elem(e, t.norm_to(deg, e, x), n),
                       system.char_value(ch, x))
                      for x in range(1, t.order(deg))])
    total = cy.from_int(0)
    for combo in product(*pools):
        det = a
        val = cy.from_int(1)
        for nm_i, v_i in combo:
            det = t.mul(e, det, nm_i)
            val = val * v_i
        total = total + system.psi_value(e, det) * val
    return total


def _factor_through_det(system, algebra, module, lam):
    """A base character mu with lam = mu o det_V, or None."""
    t = system.tower
    e = algebra.base_degree
    for idx in range(t.group_order(e)):
        mu = system.character(e, idx)
        if all(system.lift_character(system.char_pow(mu, n), deg) == ch
               for ch, n, deg in zip(lam.chars, module.ranks,
                                     algebra.degrees)):
            return mu
    return None


def i_norm_closed(system: CharSystem, algebra: EtaleAlgebra,
                  module: VirtualModule, lam: NormCharacter,
                  a: int) -> CycloValue:
    """Closed form of I_{V,lam}(a): zero unless lam factors through det_V
    as mu, then |k^*|/(q-1) times the sum of g(mu nu)(mu nu)(a^{-1}) over
    the characters nu trivial on the image of det_V."""
    check_norm_data(system, algebra, module, lam, a)
    _check_rank_coprimality(system, module)
    t = system.tower
    e = algebra.base_degree
    mu = _factor_through_det(system, algebra, module, lam)
    if mu is None:
        return cy.from_int(0)
    grp = t.group_order(e)
    units = 1
    for d in algebra.degrees:
        units *= t.order(d) - 1
    dv = d_of(module)
    ai = t.inv(e, a)
    total = cy.from_int(0)
    for idx in range(grp):
        nu = system.character(e, idx)
        # nu kills the image of det_V iff its order divides gcd of ranks;
        # the zero module leaves the whole dual group
        if dv and dv % system.char_order(nu):
            continue
        munu = system.char_mul(mu, nu)
        total = total + system.gauss_sum(munu) * system.char_value(munu, ai)
    return cy.from_int(units // grp) * total


# ---------------------------------------------------------- transform solver


@dataclass(frozen=True)
class NormSolution:
    """Transformed module data (ranks, characters, b) plus the constant c.

    case 1 covers base rank 2 (module kept), case 2 covers base rank 0
    (module negated).  nu is the mediating base-field character; twist is
    the integer m with 2m + 1 = [nu trivial] + sum of d_i over trivial
    chi_i.
    """

    case: int
    ranks: tuple
    characters: NormCharacter
    nu: MultCharacter
    b: int
    c: CycloValue
    twist: int


def _single_point(div: Divisor):
    recs = div.records()
    if len(recs) != 1 or recs[0]["mult"] != 1:
        return None
    return Fraction(recs[0]["num"], recs[0]["den"])


def solve_norm_transform(system: CharSystem, algebra: EtaleAlgebra,
                         module: VirtualModule, chi: NormCharacter,
                         a: int) -> NormSolution:
    """Solve the divisor equation for the mediating base character nu and
    assemble the transformed module datum with its constant.

    The equation (0) +/- (point of nu^{-1}) = sum_i d_i D_{chi_i^{-1}, n_i}
    pins nu uniquely; the scale relations are a*b = -1/p(V) in case 1 and
    a/b = 1/p(V) in case 2.
    """
    check_norm_data(system, algebra, module, chi, a)
    t = system.tower
    e = algebra.base_degree
    q = t.order(e)
    rank = rk(algebra, module)
    if rank == 2:
        case = 1
    elif rank == 0:
        case = 2
    else:
        raise SchemaError(f"base rank {rank} admits no transform identity")
    dv = d_of(module)
    if case == 1 and dv == 2 and t.p == 2:
        raise SchemaError("rank gcd 2 needs odd q")

    inv_chi = NormCharacter(tuple(system.char_inv(ch) for ch in chi.chars))
    rhs = module_divisor(system, algebra, inv_chi, module)
    origin = Divisor({Fraction(0): 1})
    rest = rhs - origin if case == 1 else origin - rhs
    r = _single_point(rest)
    if r is None:
        raise SchemaError("divisor equation has no mediating character")
    if case == 1 and dv == 2 and r != Fraction(1, 2):
        raise SchemaError("rank gcd 2 requires the order-2 character")
    if case == 2 and dv != 1 and r != 0:
        raise SchemaError("rank gcd > 1 requires a trivial mediating character")
    if (q - 1) % r.denominator:
        raise SchemaError(
            f"mediating point {r} is not realized over the base field F_{q}")
    nu = system.char_from_point(e, frac_mod1(-r))

    pv = p_of(system, algebra, module)
    if case == 1:
        b = t.neg(e, t.inv(e, t.mul(e, a, pv)))
    else:
        b = t.mul(e, a, pv)

    trivial = int(system.is_trivial(nu)) + sum(
        d * system.is_trivial(ch)
        for ch, d in zip(chi.chars, algebra.rel_degrees()))
    if trivial % 2 == 0:
        raise InternalCheckError(
            f"solution has trivial-character weight {trivial}; "
            f"an odd weight is forced")
    m = (trivial - 1) // 2

    dim = algebra.dim()
    if case == 1:
        head = -system.gauss_sum(system.char_inv(nu))
        argval = system.char_value(nu, t.neg(e, b))
        out_ranks = module.ranks
    else:
        head = -system.gauss_sum(nu)
        argval = system.char_value(system.char_inv(nu), t.neg(e, b))
        out_ranks = tuple(-n for n in module.ranks)
    c = head * argval * cy.from_int((-1) ** dim) * q ** m
    for ch in chi.chars:
        c = c * system.gauss_sum(ch)
    norm = (c * c.conjugate()).as_int()
    if norm != q ** dim:
        raise InternalCheckError(
            f"|c|^2 = {norm} differs from q^dim = {q ** dim}")

    eta = NormCharacter(tuple(
        system.char_mul(
            system.lift_character(system.char_pow(nu, n), deg),
            system.char_inv(ch))
        for ch, n, deg in zip(chi.chars, module.ranks, algebra.degrees)))
    return NormSolution(case, out_ranks, eta, nu, b, c, m)


def _i_norm(system, algebra, module, lam, a, method):
    if method == "direct":
        return i_norm_direct(system, algebra, module, lam, a)
    if method == "closed":
        return i_norm_closed(system, algebra, module, lam, a)
    raise SchemaError(f"unknown method {method!r}")


def verify_norm_moments(system: CharSystem, algebra: EtaleAlgebra,
                        module: VirtualModule, chi: NormCharacter, a: int,
                        solution: NormSolution, lam: NormCharacter, *,
                        method: str = "closed") -> bool:
    """Check (-q)^dim I_{V, chi/lam}(a) = c conj(g(lam)) I_{W, eta lam}(b)
    for a non-degenerate lam; q is the base field size."""
    check_norm_data(system, algebra, module, chi, a)
    if not is_nondegenerate(system, lam):
        raise SchemaError("twisting characters must all be nontrivial")
    q = system.tower.order(algebra.base_degree)
    lhs_chars = NormCharacter(tuple(
        system.char_mul(ch, system.char_inv(lm))
        for ch, lm in zip(chi.chars, lam.chars)))
    lhs = cy.from_int(-q) ** algebra.dim() * _i_norm(
        system, algebra, module, lhs_chars, a, method)
    rhs_chars = NormCharacter(tuple(
        system.char_mul(et, lm)
        for et, lm in zip(solution.characters.chars, lam.chars)))
    rhs = solution.c * gauss_sum_algebra(system, algebra, lam).conjugate() \
        * _i_norm(system, algebra, VirtualModule(solution.ranks),
                  rhs_chars, solution.b, method)
    return lhs == rhs


# --------------------------------------------------------------- base change


def base_change(system: CharSystem, algebra: EtaleAlgebra,
                e: int) -> EtaleAlgebra:
    """Extend scalars by degree e: a factor of relative degree d splits
    into gcd(d, e) copies of the compositum."""
    check_norm_data(system, algebra)
    if e < 1:
        raise SchemaError(f"extension degree {e} must be positive")
    eb = algebra.base_degree
    out = []
    for deg in algebra.degrees:
        rel = deg // eb
        out.extend([math.lcm(deg, eb * e)] * math.gcd(rel, e))
    return EtaleAlgebra(algebra.tower, tuple(out), eb * e)


def extend_module(system: CharSystem, algebra: EtaleAlgebra,
                  module: VirtualModule, e: int) -> VirtualModule:
    check_norm_data(system, algebra, module)
    eb = algebra.base_degree
    out = []
    for n, deg in zip(module.ranks, algebra.degrees):
        out.extend([n] * math.gcd(deg // eb, e))
    return VirtualModule(tuple(out))


def extend_character(system: CharSystem, algebra: EtaleAlgebra,
                     chi: NormCharacter, e: int) -> NormCharacter:
    """Norm-lift each factor character to the extended factor; every copy
    of a split factor carries the same lift."""
    check_norm_data(system, algebra, chi=chi)
    eb = algebra.base_degree
    out = []
    for ch, deg in zip(chi.chars, algebra.degrees):
        lifted = system.lift_character(ch, math.lcm(deg, eb * e))
        out.extend([lifted] * math.gcd(deg // eb, e))
    return NormCharacter(tuple(out))


def extend_scalar(system: CharSystem, algebra: EtaleAlgebra,
                  a: int, e: int) -> int:
    check_norm_data(system, algebra, a=a)
    eb = algebra.base_degree
    return system.tower.embed(eb, eb * e, a)


def sweep_norm_moments(system: CharSystem, algebra: EtaleAlgebra,
                       module: VirtualModule, chi: NormCharacter, a: int, *,
                       depth: int = 2, method: str = "closed") -> dict:
    """Run verify_norm_moments over every non-degenerate character at each
    extension degree e <= depth; the report counts nonvanishing ones."""
    check_norm_data(system, algebra, module, chi, a)
    report = {"depth": depth, "checked": 0, "nonvanishing": 0,
              "failures": [], "truncated_at_depth": depth}
    for e in range(1, depth + 1):
        alg_e = base_change(system, algebra, e)
        mod_e = extend_module(system, algebra, module, e)
        chi_e = extend_character(system, algebra, chi, e)
        a_e = extend_scalar(system, algebra, a, e)
        sol_e = solve_norm_transform(system, alg_e, mod_e, chi_e, a_e)
        q_e = system.tower.order(alg_e.base_degree)
        for lam in iter_nondegenerate(system, alg_e):
            lhs_chars = NormCharacter(tuple(
                system.char_mul(ch, system.char_inv(lm))
                for ch, lm in zip(chi_e.chars, lam.chars)))
            lhs = cy.from_int(-q_e) ** alg_e.dim() * _i_norm(
                system, alg_e, mod_e, lhs_chars, a_e, method)
            rhs_chars = NormCharacter(tuple(
                system.char_mul(et, lm)
                for et, lm in zip(sol_e.characters.chars, lam.chars)))
            rhs = sol_e.c \
                * gauss_sum_algebra(system, alg_e, lam).conjugate() \
                * _i_norm(system, alg_e, VirtualModule(sol_e.ranks),
                          rhs_chars, sol_e.b, method)
            report["checked"] += 1
            if lhs != rhs:
                report["failures"].append(
                    {"degree": alg_e.base_degree,
                     "lams": [lm.index for lm in lam.chars]})
            elif not lhs.is_zero():
                report["nonvanishing"] += 1
    report["pass"] = not report["failures"] and report["nonvanishing"] > 0
    return report


# ------------------------------------------------------------- consistency


def divisor_descent_probe(system: CharSystem, chi: MultCharacter,
                          n: int, l: int) -> bool:
    """The two reduction routes for a degree-weighted divisor image agree:
    l copies of chi at degree d match one norm-lift of chi at degree d*l."""
    d = chi.degree
    direct = divisor_of_char_power(system.char_point(chi), n).scale(d * l)
    lifted = system.lift_character(chi, d * l)
    rewritten = divisor_of_char_power(
        system.char_point(lifted), n).scale(d * l)
    return direct == rewritten


def as_monomial_datum(algebra: EtaleAlgebra, module: VirtualModule,
                      chi: NormCharacter, a: int) -> MonomialDatum:
    """The monomial datum a split algebra's data reduces to."""
    if any(d != algebra.base_degree for d in algebra.degrees):
        raise SchemaError("algebra is not split over its base field")
    if any(n == 0 for n in module.ranks):
        raise SchemaError("zero ranks have no monomial counterpart")
    return MonomialDatum(algebra.base_degree, module.ranks, chi.chars, a)

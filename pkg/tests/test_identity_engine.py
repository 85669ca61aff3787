"""Tests for the monomial identity engine."""

from __future__ import annotations

from fractions import Fraction

import pytest

from charsum.characters import CharSystem
from charsum.divisor_calc import Divisor
from charsum.errors import InternalCheckError, SchemaError
from charsum.field_tower import build_tower
from charsum.identity_engine import (
    GammaMonomial,
    find_violation,
    predicted_divisor,
    verify_monomial_identity,
)

F = Fraction


def system(p, s=1, degrees=(1,)):
    return CharSystem(build_tower(p, s, degrees=degrees))


def hd_monomial(sys, n, degree=1):
    """(1, n), (1, -1), and (eps_n^i, -1) for 0 < i < n; divisor is zero."""
    one = sys.trivial(degree)
    terms = [(one, n), (one, -1)]
    for i in range(1, n):
        terms.append((sys.char_of_order(degree, n, power=i), -1))
    return GammaMonomial(terms)


def test_predicted_divisor_fixtures():
    sys = system(7)
    one = sys.trivial(1)
    e2 = sys.char_of_order(1, 2)
    e3 = sys.char_of_order(1, 3)
    m = GammaMonomial([(one, 2), (one, -1), (e2, -1)])
    assert predicted_divisor(sys, m).is_zero()
    assert predicted_divisor(sys, GammaMonomial([])).is_zero()
    # (1, 3) contributes the three cube roots; (e3, -1) removes e3^{-1}
    m2 = GammaMonomial([(one, 3), (e3, -1)])
    assert predicted_divisor(sys, m2) == Divisor({F(0): 1, F(1, 3): 1})
    m3 = GammaMonomial([(e3, 1), (sys.char_inv(e3), -1)])
    assert predicted_divisor(sys, m3).is_zero()


def test_predicted_divisor_rejects_bad_exponents():
    sys = system(3)
    one = sys.trivial(1)
    with pytest.raises(SchemaError):
        predicted_divisor(sys, GammaMonomial([(one, 0)]))
    with pytest.raises(SchemaError):
        predicted_divisor(sys, GammaMonomial([(one, 3)]))
    with pytest.raises(SchemaError):
        predicted_divisor(sys, GammaMonomial([(one, -6)]))


def test_verify_quadratic_monomial_q7():
    sys = system(7)
    one = sys.trivial(1)
    e2 = sys.char_of_order(1, 2)
    m = GammaMonomial([(one, 2), (one, -1), (e2, -1)])
    expected = {0: 0, 1: 1, 2: 1, 3: 0, 4: 1, 5: 1}
    for idx, want in expected.items():
        assert verify_monomial_identity(sys, m, sys.character(1, idx)) == want


def test_verify_negative_exponent_m():
    sys = system(7)
    e2 = sys.char_of_order(1, 2)
    m = GammaMonomial([(e2, 1), (e2, -1)])
    assert predicted_divisor(sys, m).is_zero()
    assert verify_monomial_identity(sys, m, e2) == -1
    assert verify_monomial_identity(sys, m, sys.trivial(1)) == 0


def test_verify_rejects_nonzero_divisor():
    sys = system(7)
    m = GammaMonomial([(sys.trivial(1), 3), (sys.char_of_order(1, 3), -1)])
    with pytest.raises(SchemaError):
        verify_monomial_identity(sys, m, sys.trivial(1))


def test_verify_hd_families_all_lambdas():
    for p, degrees, ns in ((3, (1, 2), (2,)), (5, (1, 2), (2, 4)),
                           (7, (1,), (2, 3, 6))):
        sys = system(p, degrees=degrees)
        for n in ns:
            m = hd_monomial(sys, n)
            for d in degrees:
                for idx in range(sys.tower.group_order(d)):
                    lam = sys.character(d, idx)
                    got = verify_monomial_identity(sys, m, lam)
                    assert isinstance(got, int)


def test_verify_extension_stability():
    # m(lam o Nm) over the quadratic extension equals m(lam)
    sys = system(7, degrees=(1, 2))
    m = hd_monomial(sys, 2)
    for idx in range(6):
        lam = sys.character(1, idx)
        lifted = sys.lift_character(lam, 2)
        assert verify_monomial_identity(sys, m, lifted) == \
            verify_monomial_identity(sys, m, lam)


def test_verify_inverse_pair_all_lambdas():
    sys = system(7)
    e3 = sys.char_of_order(1, 3)
    m = GammaMonomial([(e3, 1), (sys.char_inv(e3), -1)])
    for idx in range(6):
        want = -1 if idx == sys.char_inv(e3).index else 0
        assert verify_monomial_identity(sys, m, sys.character(1, idx)) == want


def test_verify_mixed_degree_terms():
    sys = system(3, degrees=(1, 2))
    chi = sys.character(2, 1)
    m = GammaMonomial([(chi, 1), (sys.char_inv(chi), -1)])
    assert predicted_divisor(sys, m).is_zero()
    for idx in range(8):
        got = verify_monomial_identity(sys, m, sys.character(2, idx))
        assert isinstance(got, int)
    # degree-1 terms verified at degree 2 go through the norm lift
    m2 = GammaMonomial([(sys.trivial(1), 2), (sys.trivial(1), -1),
                        (sys.char_of_order(1, 2), -1)])
    assert verify_monomial_identity(sys, m2, sys.character(2, 1)) == 1
    with pytest.raises(SchemaError):
        verify_monomial_identity(sys, m, sys.trivial(1))


def test_find_violation_imbalance_q3():
    sys = system(3)
    m = GammaMonomial([(sys.trivial(1), 1), (sys.char_of_order(1, 2), -1)])
    got = find_violation(sys, m, 1)
    assert got == (1, sys.char_of_order(1, 2))


def test_find_violation_cubic_q7():
    sys = system(7)
    m = GammaMonomial([(sys.trivial(1), 3), (sys.char_of_order(1, 3), -1)])
    got = find_violation(sys, m, 2)
    assert got is not None and got != "inconclusive"
    assert got[0] == 1


def test_find_violation_sound_on_zero_divisor():
    for p, n in ((3, 2), (5, 2), (5, 4), (7, 3)):
        sys = system(p, degrees=(1, 2))
        assert find_violation(sys, hd_monomial(sys, n), 2) is None
    sys = system(7)
    e2 = sys.char_of_order(1, 2)
    assert find_violation(sys, GammaMonomial([(e2, 1), (e2, -1)]), 2) is None
    assert find_violation(sys, GammaMonomial([]), 2) is None


def test_find_violation_inconclusive_until_deep_enough():
    # divisor of (eps_2, 2) lives at order 4, invisible inside F_3
    sys = system(3, degrees=(1, 2))
    m = GammaMonomial([(sys.char_of_order(1, 2), 2)])
    assert find_violation(sys, m, 1) == "inconclusive"
    got = find_violation(sys, m, 2)
    assert got is not None and got != "inconclusive"
    assert got[0] == 2

"""Tests for character systems and exact Gauss sums."""

from __future__ import annotations

from fractions import Fraction

import pytest

from charsum.characters import CharSystem
from charsum.cyclotomic import from_int, from_root_counts, root
from charsum.errors import SchemaError
from charsum.field_tower import build_tower


def system(p, s=1, degrees=(1,), c=1):
    return CharSystem(build_tower(p, s, degrees=degrees), c=c)


def test_gauss_sum_quadratic_fixture():
    sy = system(3)
    eps2 = sy.char_of_order(1, 2)
    assert sy.gauss_sum(eps2) == from_root_counts(3, {1: 1, 2: -1})


def test_trivial_gauss_sum_is_minus_one():
    for p, s in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1)]:
        sy = system(p, s)
        assert sy.gauss_sum(sy.trivial(1)) == -1


def test_gauss_sum_magnitude():
    for p, s in [(3, 1), (2, 2), (5, 1), (7, 1), (3, 2)]:
        sy = system(p, s)
        q = sy.tower.q
        for idx in range(1, q - 1):
            assert sy.gauss_sum(sy.character(1, idx)).abs_squared() == q


def test_gauss_sum_reflection():
    for p in (5, 7):
        sy = system(p)
        for idx in range(1, p - 1):
            chi = sy.character(1, idx)
            lhs = sy.gauss_sum(chi) * sy.gauss_sum(sy.char_inv(chi))
            assert lhs == sy.char_value(chi, sy.tower.minus_one()) * p


def test_conj_gauss_sum():
    for p in (5, 7):
        sy = system(p)
        for idx in range(p - 1):
            chi = sy.character(1, idx)
            assert sy.conj_gauss_sum(chi) == sy.gauss_sum(chi).conjugate()


def test_twist_changes_gauss_sum_by_character_value():
    base = system(7, c=1)
    twisted = system(7, c=3)
    for idx in range(6):
        chi = base.character(1, idx)
        expected = base.char_value(base.char_inv(chi), 3) * base.gauss_sum(chi)
        assert twisted.gauss_sum(chi) == expected


def test_char_values_multiplicative():
    sy = system(3, degrees=(1, 2))
    chi = sy.character(2, 3)
    t = sy.tower
    for x in range(1, 9):
        for y in range(1, 9):
            assert sy.char_value(chi, t.mul(2, x, y)) == \
                sy.char_value(chi, x) * sy.char_value(chi, y)
    assert sy.char_value(chi, 0) == 0


def test_quadratic_char_is_square_indicator():
    sy = system(7)
    eps2 = sy.char_of_order(1, 2)
    squares = {(x * x) % 7 for x in range(1, 7)}
    for x in range(1, 7):
        expected = 1 if x in squares else -1
        assert sy.char_value(eps2, x) == expected


def test_psi_additive():
    sy = system(3, 2)
    t = sy.tower
    for x in range(9):
        for y in range(9):
            assert sy.psi_value(1, t.add(1, x, y)) == \
                sy.psi_value(1, x) * sy.psi_value(1, y)


def test_char_point_roundtrip():
    sy = system(5)
    eps2 = sy.char_of_order(1, 2)
    assert sy.char_point(eps2) == Fraction(1, 2)
    assert sy.char_from_point(1, Fraction(1, 2)) == eps2
    assert sy.char_from_point(1, Fraction(5, 4)) == sy.character(1, 1)
    with pytest.raises(SchemaError):
        sy.char_from_point(1, Fraction(1, 3))


def test_lift_preserves_point():
    sy = system(3, degrees=(1, 2))
    chi = sy.char_of_order(1, 2)
    lifted = sy.lift_character(chi, 2)
    assert lifted.index == 4
    assert sy.char_point(lifted) == sy.char_point(chi)


def test_char_group_operations():
    sy = system(7)
    a = sy.character(1, 2)
    b = sy.character(1, 5)
    assert sy.char_mul(a, b).index == 1
    assert sy.char_inv(a).index == 4
    assert sy.char_order(a) == 3
    assert sy.is_trivial(sy.char_pow(a, 3))
    with pytest.raises(SchemaError):
        sy.char_of_order(1, 4)


def test_hd_lift():
    sy3 = system(3, degrees=(1, 2, 3))
    eps2 = sy3.char_of_order(1, 2)
    assert sy3.check_hd_lift(eps2, 2)
    assert sy3.check_hd_lift(eps2, 3)
    assert sy3.check_hd_lift(sy3.trivial(1), 2)

    sy5 = system(5, degrees=(1, 2, 3))
    for idx in range(4):
        for d in (2, 3):
            assert sy5.check_hd_lift(sy5.character(1, idx), d)

    sy4 = system(2, 2, degrees=(1, 2))
    for idx in range(3):
        assert sy4.check_hd_lift(sy4.character(1, idx), 2)


def test_hd_lift_from_intermediate_degree():
    sy = system(3, degrees=(1, 2, 4))
    chi = sy.character(2, 3)
    assert sy.check_hd_lift(chi, 4)


def test_hd_product():
    sy7 = system(7)
    for n in (2, 3, 6):
        for idx in range(6):
            assert sy7.check_hd_product(sy7.character(1, idx), n)
    sy13 = system(13)
    for n in (2, 3, 4, 6, 12):
        assert sy13.check_hd_product(sy13.character(1, 1), n)
    with pytest.raises(SchemaError):
        sy7.check_hd_product(sy7.character(1, 1), 4)


def test_kloosterman_fixture():
    sy = system(5)
    triv = sy.trivial(1)
    k1 = sy.kloosterman(1, (triv, triv), 1)
    assert k1 == from_root_counts(5, {0: 2, 2: 1, 3: 1})


def test_kloosterman_single_factor():
    sy = system(7)
    chi = sy.character(1, 2)
    for t_code in range(1, 7):
        expected = sy.psi_value(1, t_code) * sy.char_value(chi, t_code)
        assert sy.kloosterman(1, (chi,), t_code) == expected


def test_kloosterman_fourier_invariant():
    # sum_t K(t) lam(t) = prod_i g(lam chi_i)
    sy = system(5)
    chars = (sy.trivial(1), sy.char_of_order(1, 2))
    for lam_idx in range(4):
        lam = sy.character(1, lam_idx)
        total = from_int(0)
        for t_code in range(1, 5):
            total = total + sy.kloosterman(1, chars, t_code) * \
                sy.char_value(lam, t_code)
        expected = sy.gauss_sum(sy.char_mul(lam, chars[0])) * \
            sy.gauss_sum(sy.char_mul(lam, chars[1]))
        assert total == expected


def test_kloosterman_inversion():
    # n * K(t) = sum_lam prod_i g(lam chi_i) lam(1/t)
    sy = system(5)
    chars = (sy.trivial(1), sy.trivial(1))
    n = 4
    t = sy.tower
    for t_code in range(1, 5):
        total = from_int(0)
        for lam_idx in range(n):
            lam = sy.character(1, lam_idx)
            prod = sy.gauss_sum(lam) * sy.gauss_sum(lam)
            total = total + prod * sy.char_value(lam, t.inv(1, t_code))
        assert total == n * sy.kloosterman(1, chars, t_code)


def test_kloosterman_three_variables():
    sy = system(3)
    triv = sy.trivial(1)
    eps = sy.char_of_order(1, 2)
    chars = (triv, eps, triv)
    for lam_idx in range(2):
        lam = sy.character(1, lam_idx)
        total = from_int(0)
        for t_code in (1, 2):
            total = total + sy.kloosterman(1, chars, t_code) * \
                sy.char_value(lam, t_code)
        expected = from_int(1)
        for ch in chars:
            expected = expected * sy.gauss_sum(sy.char_mul(lam, ch))
        assert total == expected


def test_product_of_gauss_cached_and_order_free():
    sy = system(7)
    v1 = sy.product_of_gauss(1, (1, 2, 3))
    v2 = sy.product_of_gauss(1, (3, 2, 1))
    v3 = sy.product_of_gauss(1, (1 + 6, 2, 3))
    assert v1 == v2 == v3
    direct = from_int(1)
    for i in (1, 2, 3):
        direct = direct * sy.gauss_sum(sy.character(1, i))
    assert v1 == direct


def test_gauss_sum_lifted_character_stays_small_order():
    # lifted characters produce values in the base-order ring
    sy = system(7, degrees=(1, 2))
    chi = sy.char_of_order(1, 3)
    lifted = sy.lift_character(chi, 2)
    val = sy.gauss_sum(lifted)
    assert val.order <= 21


def test_bad_twist():
    with pytest.raises(SchemaError):
        system(5, c=0)
    with pytest.raises(SchemaError):
        system(5, c=5)

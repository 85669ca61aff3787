"""Tests for the norm layer: etale algebras, det-twisted sums, the solver."""

from __future__ import annotations

from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

import charsum.cyclotomic as cy
from charsum.characters import CharSystem
from charsum.cyclotomic import CycloValue
from charsum.divisor_calc import Divisor
from charsum.errors import InternalCheckError, SchemaError, SizeBoundError
from charsum.field_tower import build_tower
from charsum.monomial_fourier import (
    MonomialDatum,
    i_sum_closed,
    solve_monomial_transform,
    verify_twisted_moments,
)
from charsum.norm_algebra import (
    EtaleAlgebra,
    NormCharacter,
    VirtualModule,
    as_monomial_datum,
    base_change,
    check_norm_data,
    d_of,
    det_module,
    divisor_descent_probe,
    extend_character,
    extend_module,
    extend_scalar,
    gauss_sum_algebra,
    i_norm_closed,
    i_norm_direct,
    is_nondegenerate,
    iter_nondegenerate,
    module_divisor,
    p_of,
    rk,
    solve_norm_transform,
    sweep_norm_moments,
    verify_norm_identity,
    verify_norm_moments,
)

S3 = CharSystem(build_tower(3, degrees=(1, 2)))
S7 = CharSystem(build_tower(7, degrees=(1, 2)))
T3 = S3.tower

K9 = EtaleAlgebra(T3, (2,))
K33 = EtaleAlgebra(T3, (1, 1))
K39 = EtaleAlgebra(T3, (1, 2))
K93 = EtaleAlgebra(T3, (2, 1))

TRIV3 = S3.trivial(1)
TRIV9 = S3.trivial(2)
E2 = S3.char_of_order(1, 2)


# ----------------------------------------------------- construction checks


def test_etale_algebra_validation():
    with pytest.raises(SchemaError):
        EtaleAlgebra(T3, ())
    with pytest.raises(SchemaError):
        EtaleAlgebra(T3, (5,))
    with pytest.raises(SchemaError):
        EtaleAlgebra(T3, (1,), base_degree=2)
    with pytest.raises(SchemaError):
        EtaleAlgebra(T3, (2,), base_degree=4)


def test_algebra_shape_accessors():
    assert K9.r == 1 and K9.rel_degrees() == (2,) and K9.dim() == 2
    assert K39.r == 2 and K39.rel_degrees() == (1, 2) and K39.dim() == 3
    over9 = EtaleAlgebra(T3, (2, 2), base_degree=2)
    assert over9.rel_degrees() == (1, 1) and over9.dim() == 2


def test_check_norm_data_errors():
    other = CharSystem(build_tower(3, degrees=(1, 2)))
    with pytest.raises(SchemaError):
        check_norm_data(other, K9)
    with pytest.raises(SchemaError):
        check_norm_data(S3, K9, module=VirtualModule((1, 1)))
    with pytest.raises(SchemaError):
        check_norm_data(S3, K9, chi=NormCharacter((TRIV9, TRIV9)))
    with pytest.raises(SchemaError):
        check_norm_data(S3, K9, chi=NormCharacter((TRIV3,)))
    with pytest.raises(SchemaError):
        check_norm_data(S3, K9, a=0)
    with pytest.raises(SchemaError):
        check_norm_data(S3, K33, a=3)
    check_norm_data(S3, K33, VirtualModule((1, -1)),
                    NormCharacter((E2, E2)), 2)


def test_rank_coprimality():
    # rank 3 in characteristic 3 has no well-defined scale
    with pytest.raises(SchemaError):
        p_of(S3, K33, VirtualModule((3, 1)))
    # zero ranks are exempt
    assert p_of(S3, K33, VirtualModule((0, 1))) == 1


# -------------------------------------------------------------- basic ops


def test_rk_and_d_of():
    assert rk(K9, VirtualModule((1,))) == 2
    assert rk(K93, VirtualModule((1, -2))) == 0
    assert rk(K39, VirtualModule((1, 1))) == 3
    assert d_of(VirtualModule((1, -2))) == 1
    assert d_of(VirtualModule((2, -2))) == 2
    assert d_of(VirtualModule((0, 0))) == 0


def test_p_of_values():
    assert p_of(S3, K9, VirtualModule((1,))) == T3.from_int(1)
    one_factor = EtaleAlgebra(T3, (1,))
    # 2^{2*1} = 4 = 1 mod 3
    assert p_of(S3, one_factor, VirtualModule((2,))) == T3.from_int(1)
    t7 = S7.tower
    # 3^{3*1} = 27 = 6 mod 7
    assert p_of(S7, EtaleAlgebra(t7, (1,)), VirtualModule((3,))) \
        == t7.from_int(27)
    assert p_of(S3, K93, VirtualModule((0, 0))) == T3.from_int(1)


def test_det_module_values():
    # det of the degree-2 generator lands on the degree-1 generator
    V = VirtualModule((1,))
    assert det_module(S3, K9, V, (T3.exp(2, 1),)) == T3.exp(1, 1)
    with pytest.raises(SchemaError):
        det_module(S3, K9, V, (0,))
    with pytest.raises(SchemaError):
        det_module(S3, K9, V, (1, 1))


@given(st.integers(1, 2), st.integers(1, 8), st.integers(1, 2),
       st.integers(1, 8))
def test_det_module_multiplicative(x1, x2, y1, y2):
    V = VirtualModule((1, -2))
    xy = (T3.mul(1, x1, y1), T3.mul(2, x2, y2))
    lhs = det_module(S3, K39, V, xy)
    rhs = T3.mul(1, det_module(S3, K39, V, (x1, x2)),
                 det_module(S3, K39, V, (y1, y2)))
    assert lhs == rhs


# -------------------------------------------------------------- Gauss sums


def test_gauss_sum_algebra_fixtures():
    assert gauss_sum_algebra(S3, K9, NormCharacter((TRIV9,))) \
        == cy.from_int(-1)
    lhs = gauss_sum_algebra(S3, K33, NormCharacter((E2, TRIV3)))
    assert lhs == S3.gauss_sum(E2) * cy.from_int(-1)
    nd = NormCharacter((S3.character(2, 3),))
    assert gauss_sum_algebra(S3, K9, nd).abs_squared() == 9


def test_gauss_sum_factor_matches_direct():
    e2_9 = S3.char_of_order(2, 2)
    cases = [(K9, (e2_9,), 9), (K33, (E2, E2), 9), (K39, (E2, e2_9), 27)]
    for alg, chars, sq in cases:
        nc = NormCharacter(chars)
        f = gauss_sum_algebra(S3, alg, nc)
        assert f == gauss_sum_algebra(S3, alg, nc, method="direct")
        assert f.abs_squared() == sq


def test_gauss_sum_direct_guards():
    nc = NormCharacter((TRIV3, TRIV9))
    with pytest.raises(SizeBoundError):
        gauss_sum_algebra(S3, K39, nc, method="direct", max_terms=10)
    with pytest.raises(SchemaError):
        gauss_sum_algebra(S3, K39, nc, method="resum")


# ---------------------------------------------------------------- divisors


def test_module_divisor_fixtures():
    from fractions import Fraction
    div = module_divisor(S3, K9, NormCharacter((TRIV9,)), VirtualModule((1,)))
    assert div == Divisor({Fraction(0): 2})
    assert module_divisor(S3, K93, NormCharacter((TRIV9, TRIV3)),
                          VirtualModule((0, 0))).is_zero()
    # opposite ranks on equal characters cancel
    assert module_divisor(S3, K33, NormCharacter((E2, E2)),
                          VirtualModule((1, -1))).is_zero()


def test_divisor_descent_probe():
    for i in range(2):
        for n in (1, 2, -1, -2):
            assert divisor_descent_probe(S3, S3.character(1, i), n, 2)
    assert divisor_descent_probe(S7, S7.character(1, 2), 3, 2)


# ------------------------------------------------------ Gauss-sum identity


def test_verify_norm_identity_fixtures():
    V = VirtualModule((1, -1))
    chi = NormCharacter((E2, E2))
    assert verify_norm_identity(S3, K33, V, chi, E2) == -1
    assert verify_norm_identity(S3, K33, V, chi, TRIV3) == 0


def test_verify_norm_identity_weighted_parity():
    # trivial characters count with the relative degree of their factor
    K99 = EtaleAlgebra(T3, (2, 2))
    m = verify_norm_identity(S3, K99, VirtualModule((1, -1)),
                             NormCharacter((TRIV9, TRIV9)), E2)
    assert m == 2


def test_verify_norm_identity_guards():
    with pytest.raises(SchemaError):
        verify_norm_identity(S3, K9, VirtualModule((1,)),
                             NormCharacter((TRIV9,)), E2)
    with pytest.raises(SchemaError):
        verify_norm_identity(S3, K33, VirtualModule((1, -1)),
                             NormCharacter((E2, E2)), TRIV9)


# ------------------------------------------------------------------ I-sums


def test_i_norm_direct_matches_closed():
    count = 0
    for alg, mods in [(K9, [(1,), (2,), (-1,), (0,)]),
                      (K33, [(1, -1), (2, -2), (1, 1), (0, 2)]),
                      (K93, [(1, -2), (1, 1), (-1, 2), (0, 1)])]:
        pools = [range(T3.group_order(d)) for d in alg.degrees]
        for ranks in mods:
            V = VirtualModule(ranks)
            for idxs in product(*pools):
                lam = NormCharacter(tuple(
                    S3.character(d, i) for d, i in zip(alg.degrees, idxs)))
                for a in (1, 2):
                    di = i_norm_direct(S3, alg, V, lam, a)
                    assert di == i_norm_closed(S3, alg, V, lam, a)
                    count += 1
    assert count == 224


def test_i_norm_nonfactoring_vanishes():
    V = VirtualModule((1, 1))
    lam = NormCharacter((E2, TRIV3))
    assert i_norm_closed(S3, K33, V, lam, 1).is_zero()
    assert i_norm_direct(S3, K33, V, lam, 1).is_zero()


def test_i_norm_matches_monomial_closed_form():
    one_factor = EtaleAlgebra(T3, (1,))
    lhs = i_norm_closed(S3, one_factor, VirtualModule((2,)),
                        NormCharacter((TRIV3,)), 1)
    rhs = i_sum_closed(S3, MonomialDatum(1, (2,), (TRIV3,), 1), (TRIV3,))
    assert lhs == rhs == CycloValue(6, (-2, 2))


# ------------------------------------------------------------------ solver


def test_solve_norm_gaussian():
    sol = solve_norm_transform(S3, K9, VirtualModule((1,)),
                               NormCharacter((TRIV9,)), 1)
    assert sol.case == 1
    assert S3.is_trivial(sol.nu)
    assert sol.b == T3.neg(1, 1)
    assert sol.c == cy.from_int(-3)
    assert sol.twist == 1
    assert sol.ranks == (1,)


def test_solve_rank_zero():
    sol = solve_norm_transform(S3, K93, VirtualModule((1, -2)),
                               NormCharacter((TRIV9, TRIV3)), 1)
    assert sol.case == 2
    assert sol.nu == E2
    assert sol.b == 1
    assert sol.c == CycloValue(6, (3, -6))
    assert sol.twist == 1
    assert sol.ranks == (-1, 2)


def test_solve_zero_module():
    sol = solve_norm_transform(S3, K9, VirtualModule((0,)),
                               NormCharacter((S3.character(2, 1),)), 1)
    assert sol.case == 2
    assert S3.is_trivial(sol.nu)
    assert sol.b == 1
    assert sol.c == CycloValue(24, (1, 1, 0, 1, -2, 1, 0, -2))
    assert sol.twist == 0


def test_solve_gcd_two():
    V = VirtualModule((2, -2))
    chi = NormCharacter((E2, E2))
    sol = solve_norm_transform(S3, K33, V, chi, 1)
    assert sol.case == 2
    assert S3.is_trivial(sol.nu)
    assert sol.b == 1 and sol.c == cy.from_int(-3) and sol.twist == 0
    assert sol.ranks == (-2, 2)
    assert verify_norm_moments(S3, K33, V, chi, 1, sol,
                               NormCharacter((E2, E2)))


def test_solve_f49_f7():
    K = EtaleAlgebra(S7.tower, (2, 1))
    sol = solve_norm_transform(S7, K, VirtualModule((1, -2)),
                               NormCharacter((S7.trivial(2), S7.trivial(1))),
                               1)
    assert sol.case == 2
    assert S7.char_order(sol.nu) == 2
    assert sol.b == 2
    assert sol.twist == 1


def test_solve_guards():
    one_factor = EtaleAlgebra(T3, (1,))
    with pytest.raises(SchemaError):
        solve_norm_transform(S3, one_factor, VirtualModule((1,)),
                             NormCharacter((TRIV3,)), 1)
    with pytest.raises(SchemaError):
        solve_norm_transform(S3, K39, VirtualModule((1, 1)),
                             NormCharacter((TRIV3, TRIV9)), 1)
    # a nontrivial F_9 character leaves no single mediating point
    with pytest.raises(SchemaError):
        solve_norm_transform(S3, K9, VirtualModule((1,)),
                             NormCharacter((S3.character(2, 1),)), 1)
    # dummy zero-rank factor with trivial character: even weight
    with pytest.raises(InternalCheckError):
        solve_norm_transform(S3, K33, VirtualModule((2, 0)),
                             NormCharacter((TRIV3, TRIV3)), 1)
    S2 = CharSystem(build_tower(2, degrees=(1, 2)))
    K22 = EtaleAlgebra(S2.tower, (1, 1))
    with pytest.raises(SchemaError):
        solve_norm_transform(S2, K22, VirtualModule((2, 0)),
                             NormCharacter((S2.trivial(1), S2.trivial(1))), 1)


# ------------------------------------------------------- moments and sweeps


def test_norm_gaussian_moments():
    V = VirtualModule((1,))
    chi = NormCharacter((TRIV9,))
    sol = solve_norm_transform(S3, K9, V, chi, 1)
    for i in range(1, 8):
        lam = NormCharacter((S3.character(2, i),))
        ok = verify_norm_moments(S3, K9, V, chi, 1, sol, lam)
        assert ok == verify_norm_moments(S3, K9, V, chi, 1, sol, lam,
                                         method="direct")
        assert ok


def test_moments_trivial_lam_rejected():
    V = VirtualModule((1,))
    chi = NormCharacter((TRIV9,))
    sol = solve_norm_transform(S3, K9, V, chi, 1)
    with pytest.raises(SchemaError):
        verify_norm_moments(S3, K9, V, chi, 1, sol, NormCharacter((TRIV9,)))
    assert not is_nondegenerate(S3, NormCharacter((TRIV9,)))
    assert len(list(iter_nondegenerate(S3, K9))) == 7
    assert len(list(iter_nondegenerate(S3, K39))) == 7


def test_sweep_gaussian():
    rep = sweep_norm_moments(S3, K9, VirtualModule((1,)),
                             NormCharacter((TRIV9,)), 1, depth=2)
    assert rep["pass"]
    assert rep["checked"] == 56
    assert rep["nonvanishing"] == 8
    assert rep["failures"] == []
    assert rep["truncated_at_depth"] == 2


def test_sweep_rank_zero_and_zero_modules():
    rep = sweep_norm_moments(S3, K93, VirtualModule((1, -2)),
                             NormCharacter((TRIV9, TRIV3)), 1, depth=2)
    assert rep["pass"] and rep["checked"] == 350 and rep["nonvanishing"] == 6
    repz = sweep_norm_moments(S3, K9, VirtualModule((0,)),
                              NormCharacter((S3.character(2, 1),)), 1,
                              depth=2)
    assert repz["pass"] and repz["checked"] == 56
    assert repz["nonvanishing"] == 2
    repzz = sweep_norm_moments(S3, K39, VirtualModule((0, 0)),
                               NormCharacter((E2, S3.character(2, 1))), 1,
                               depth=1)
    assert repzz["pass"] and repzz["checked"] == 7
    assert repzz["nonvanishing"] == 1


def test_f49_f7_moments_sample():
    K = EtaleAlgebra(S7.tower, (2, 1))
    V = VirtualModule((1, -2))
    chi = NormCharacter((S7.trivial(2), S7.trivial(1)))
    sol = solve_norm_transform(S7, K, V, chi, 1)
    for i in range(1, 5):
        for j in range(1, 6):
            lam = NormCharacter((S7.character(2, i), S7.character(1, j)))
            assert verify_norm_moments(S7, K, V, chi, 1, sol, lam)


# --------------------------------------------------------- split agreement


def test_split_agreement_with_monomial_solver():
    V = VirtualModule((1, 1))
    chi = NormCharacter((TRIV3, E2))
    sol = solve_norm_transform(S3, K33, V, chi, 1)
    dat = as_monomial_datum(K33, V, chi, 1)
    mono = solve_monomial_transform(S3, dat)
    assert sol.b == mono.b
    assert sol.c == mono.c
    assert sol.twist == mono.twist
    assert tuple(sol.characters.chars) == tuple(mono.characters)
    assert S3.char_point(sol.nu) == S3.char_point(mono.chi)


def test_split_moments_both_layers():
    V = VirtualModule((1, 1))
    chi = NormCharacter((TRIV3, E2))
    sol = solve_norm_transform(S3, K33, V, chi, 1)
    dat = as_monomial_datum(K33, V, chi, 1)
    mono = solve_monomial_transform(S3, dat)
    lam = NormCharacter((E2, E2))
    assert verify_norm_moments(S3, K33, V, chi, 1, sol, lam)
    assert verify_twisted_moments(S3, dat, mono, lam.chars)


def test_as_monomial_datum_guards():
    with pytest.raises(SchemaError):
        as_monomial_datum(K9, VirtualModule((1,)), NormCharacter((TRIV9,)), 1)
    with pytest.raises(SchemaError):
        as_monomial_datum(K33, VirtualModule((1, 0)),
                          NormCharacter((TRIV3, TRIV3)), 1)


# -------------------------------------------------------------- base change


def test_base_change_shapes():
    assert base_change(S3, K9, 2).degrees == (2, 2)
    assert base_change(S3, K9, 2).base_degree == 2
    assert base_change(S3, K33, 2).degrees == (2, 2)
    assert base_change(S3, K39, 2).degrees == (2, 2, 2)
    with pytest.raises(SchemaError):
        base_change(S3, K9, 0)
    assert extend_module(S3, K9, VirtualModule((1,)), 2).ranks == (1, 1)
    ext = extend_character(S3, K9, NormCharacter((S3.character(2, 1),)), 2)
    assert [(c.degree, c.index) for c in ext.chars] == [(2, 1), (2, 1)]
    assert extend_scalar(S3, K33, 2, 2) == T3.embed(1, 2, 2)


def test_extension_stability():
    # the located exponent survives base change with the lifted twist
    V = VirtualModule((1, -1))
    chi = NormCharacter((E2, E2))
    m = verify_norm_identity(S3, K33, V, chi, E2)
    alg2 = base_change(S3, K33, 2)
    m2 = verify_norm_identity(S3, alg2, extend_module(S3, K33, V, 2),
                              extend_character(S3, K33, chi, 2),
                              S3.lift_character(E2, 2))
    assert m == m2 == -1

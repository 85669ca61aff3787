"""Tests for finite field towers: moduli, generators, embeddings, dlog."""

from __future__ import annotations

import os
import random

import pytest

from charsum.errors import SchemaError, SizeBoundError
from charsum.field_tower import build_tower

# --------------------------------------------------------- fixed moduli
# first irreducible monic polynomial in ascending code order


@pytest.mark.parametrize("p,s,d,expected", [
    (2, 1, 1, (0, 1)),
    (2, 1, 2, (1, 1, 1)),
    (2, 1, 3, (1, 1, 0, 1)),
    (2, 1, 4, (1, 1, 0, 0, 1)),
    (3, 1, 2, (1, 0, 1)),
    (3, 1, 3, (1, 2, 0, 1)),
    (5, 1, 2, (2, 0, 1)),
    (2, 2, 1, (1, 1, 1)),
    (3, 2, 1, (1, 0, 1)),
])
def test_first_irreducible_modulus(p, s, d, expected):
    t = build_tower(p, s, degrees=(d,))
    assert t.modulus(d) == expected


def test_generator_fixtures():
    assert build_tower(5).generator(1) == 2
    assert build_tower(7).generator(1) == 3
    assert build_tower(3, degrees=(1, 2)).generator(2) == 4
    assert build_tower(2, 2).generator(1) == 2


def test_dlog_fixture():
    t = build_tower(5)
    assert t.log(1, 4) == 2
    assert t.exp(1, 3) == 3  # 2^3 = 8 = 3 mod 5


def test_field_axioms_exhaustive_f8():
    t = build_tower(2, 1, degrees=(3,))
    els = range(8)
    for a in els:
        for b in els:
            assert t.add(3, a, b) == t.add(3, b, a)
            assert t.mul(3, a, b) == t.mul(3, b, a)
            for c in els:
                lhs = t.mul(3, a, t.add(3, b, c))
                rhs = t.add(3, t.mul(3, a, b), t.mul(3, a, c))
                assert lhs == rhs


def test_inverses():
    for p, s, d in [(3, 1, 2), (2, 1, 3), (2, 2, 1), (5, 1, 1)]:
        t = build_tower(p, s, degrees=(d,))
        for a in range(1, t.order(d)):
            assert t.mul(d, a, t.inv(d, a)) == 1


def test_embed_is_field_homomorphism():
    for p, s, dims in [(3, 1, (1, 2)), (2, 1, (1, 2, 4)), (2, 2, (1, 2)),
                       (5, 1, (1, 2))]:
        t = build_tower(p, s, degrees=dims)
        e, d = dims[0], dims[-1]
        size = t.order(e)
        for a in range(size):
            for b in range(size):
                assert t.embed(e, d, t.add(e, a, b)) == \
                    t.add(d, t.embed(e, d, a), t.embed(e, d, b))
                assert t.embed(e, d, t.mul(e, a, b)) == \
                    t.mul(d, t.embed(e, d, a), t.embed(e, d, b))


def test_embed_fixes_prime_field_constants():
    for p, s, d in [(3, 1, 2), (2, 2, 2), (5, 1, 2), (3, 1, 3)]:
        t = build_tower(p, s, degrees=(1, d))
        for c in range(p):
            assert t.embed(1, d, c) == c


def test_embed_transitivity():
    t = build_tower(3, 1, degrees=(1, 2, 4))
    for a in range(t.order(1)):
        assert t.embed(2, 4, t.embed(1, 2, a)) == t.embed(1, 4, a)
    t2 = build_tower(2, 1, degrees=(2, 4, 8))
    for a in range(t2.order(2)):
        assert t2.embed(4, 8, t2.embed(2, 4, a)) == t2.embed(2, 8, a)


def test_norm_matches_frobenius_product():
    for p, s, d, e in [(3, 1, 2, 1), (2, 1, 4, 2), (2, 2, 2, 1), (3, 1, 6, 2)]:
        t = build_tower(p, s, degrees=(e, d))
        q = t.q
        rng = random.Random(7)
        codes = list(range(t.order(d)))
        sample = codes if len(codes) <= 100 else rng.sample(codes, 100)
        for a in sample:
            prod = 1
            cur = a
            for _ in range(d // e):
                prod = t.mul(d, prod, cur)
                cur = t.pow_elem(d, cur, q ** e)
            if a == 0:
                prod = 0
            assert t.embed(e, d, t.norm_to(d, e, a)) == prod


def test_trace_matches_frobenius_sum():
    for p, s, d, e in [(3, 1, 2, 1), (2, 1, 4, 2), (3, 1, 6, 3)]:
        t = build_tower(p, s, degrees=(e, d))
        q = t.q
        rng = random.Random(11)
        codes = list(range(t.order(d)))
        sample = codes if len(codes) <= 100 else rng.sample(codes, 100)
        for a in sample:
            acc = 0
            cur = a
            for _ in range(d // e):
                acc = t.add(d, acc, cur)
                cur = t.pow_elem(d, cur, q ** e)
            assert t.embed(e, d, t.trace_to(d, e, a)) == acc


def test_norm_transitivity():
    t = build_tower(2, 1, degrees=(1, 2, 4))
    for a in range(16):
        assert t.norm_to(2, 1, t.norm_to(4, 2, a)) == t.norm_to(4, 1, a)


def test_norm_multiplicative_trace_additive():
    t = build_tower(3, 1, degrees=(1, 2))
    for a in range(9):
        for b in range(9):
            assert t.norm_to(2, 1, t.mul(2, a, b)) == \
                t.mul(1, t.norm_to(2, 1, a), t.norm_to(2, 1, b))
            assert t.trace_to(2, 1, t.add(2, a, b)) == \
                t.add(1, t.trace_to(2, 1, a), t.trace_to(2, 1, b))


def test_absolute_trace():
    t = build_tower(3, 2, degrees=(1, 2))
    # additive, Frobenius invariant, surjective onto F_p
    seen = set()
    for a in range(t.order(2)):
        ta = t.absolute_trace(2, a)
        seen.add(ta)
        assert ta == t.absolute_trace(2, t.pow_elem(2, a, 3) if a else 0)
    assert seen == {0, 1, 2}
    for a in range(t.order(1)):
        for b in range(t.order(1)):
            s = t.absolute_trace(1, t.add(1, a, b))
            assert s == (t.absolute_trace(1, a) + t.absolute_trace(1, b)) % 3


def test_absolute_trace_of_one():
    t = build_tower(3, 1, degrees=(1, 2))
    assert t.absolute_trace(2, 1) == 2 % 3
    t2 = build_tower(2, 2, degrees=(1,))
    assert t2.absolute_trace(1, 1) == 0  # [F_4 : F_2] = 2 is even


def test_absolute_trace_table_matches():
    for p, s, d in [(3, 1, 2), (2, 1, 4), (2, 2, 1), (5, 1, 2)]:
        t = build_tower(p, s, degrees=(d,))
        tab = t.absolute_trace_table(d)
        assert len(tab) == t.order(d)
        for a in range(t.order(d)):
            assert tab[a] == t.absolute_trace(d, a)


def test_bsgs_matches_tables():
    ta = build_tower(3, 1, degrees=(1, 3))
    tb = build_tower(3, 1, degrees=(1, 3), dlog_table_max=1)
    assert tb.exp_table(3) is None
    assert ta.generator(3) == tb.generator(3)
    for a in range(1, 27):
        assert ta.log(3, a) == tb.log(3, a)
    for a in range(27):
        for b in range(27):
            assert ta.mul(3, a, b) == tb.mul(3, a, b)
    assert list(tb.iter_generator_powers(3)) == ta.exp_table(3)


def test_pow_elem_negative():
    t = build_tower(3, 1, degrees=(2,))
    for a in range(1, 9):
        assert t.mul(2, t.pow_elem(2, a, -1), a) == 1
        assert t.pow_elem(2, a, -3) == t.inv(2, t.pow_elem(2, a, 3))


def test_size_bound():
    with pytest.raises(SizeBoundError):
        build_tower(2, 1, degrees=(23,))
    with pytest.raises(SizeBoundError):
        build_tower(3, 1, degrees=(2,), size_bound=8)


def test_bad_params():
    with pytest.raises(SchemaError):
        build_tower(4)
    with pytest.raises(SchemaError):
        build_tower(3, 0)
    with pytest.raises(SchemaError):
        build_tower(3, degrees=(0,))


def test_deep_tower_embed_sample():
    t = build_tower(3, 1, degrees=(1, 2, 3, 6))
    rng = random.Random(3)
    for _ in range(300):
        a = rng.randrange(9)
        b = rng.randrange(9)
        assert t.embed(2, 6, t.add(2, a, b)) == \
            t.add(6, t.embed(2, 6, a), t.embed(2, 6, b))
        assert t.embed(3, 6, t.mul(3, a, b)) == \
            t.mul(6, t.embed(3, 6, a), t.embed(3, 6, b))


# ------------------------------------------------------------- disk cache


def test_dlog_cache_roundtrip(tmp_path):
    d = str(tmp_path)
    t1 = build_tower(3, 1, degrees=(2,), cache_dir=d)
    files = os.listdir(d)
    assert any(f.startswith("dlog_p3_") for f in files)
    t2 = build_tower(3, 1, degrees=(2,), cache_dir=d)
    assert t1.exp_table(2) == t2.exp_table(2)


def test_dlog_cache_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("CHARSUM_CACHE_DIR", str(tmp_path))
    build_tower(5, 1, degrees=(2,))
    assert any(f.startswith("dlog_p5_") for f in os.listdir(str(tmp_path)))


def test_dlog_cache_corruption_is_ignored(tmp_path):
    d = str(tmp_path)
    t1 = build_tower(3, 1, degrees=(2,), cache_dir=d)
    fname = [f for f in os.listdir(d) if f.startswith("dlog_")][0]
    path = os.path.join(d, fname)
    blob = bytearray(open(path, "rb").read())
    blob[-1] ^= 0xFF
    open(path, "wb").write(bytes(blob))
    t2 = build_tower(3, 1, degrees=(2,), cache_dir=d)
    assert t2.exp_table(2) == t1.exp_table(2)
    open(path, "wb").write(b"garbage")
    t3 = build_tower(3, 1, degrees=(2,), cache_dir=d)
    assert t3.exp_table(2) == t1.exp_table(2)


def test_no_cache_dir_still_works(monkeypatch):
    monkeypatch.delenv("CHARSUM_CACHE_DIR", raising=False)
    t = build_tower(3, 1, degrees=(2,))
    assert t.log(2, t.generator(2)) == 1

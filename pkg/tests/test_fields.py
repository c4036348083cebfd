import random

import pytest

from core.errors import FieldConstructionError
from core.fields import (ExtensionField, PrimeField, RationalField, RationalFunctionField,
                         extension_tower, parse_field)


def _check_axioms(F, rng, rounds=30):
    for _ in range(rounds):
        a, b, c = (F.random_element(rng) for _ in range(3))
        assert F.eq((a + b) + c, a + (b + c))
        assert F.eq(a * (b + c), a * b + a * c)
        assert F.eq(a * b, b * a)
        assert F.eq(a - a, F.zero)
        if not F.is_zero(a):
            assert F.eq(a * F.inv(a), F.one)


@pytest.mark.parametrize("field", [PrimeField(7), PrimeField(101), extension_tower(PrimeField(7), 2),
                                   extension_tower(PrimeField(5), 3)])
def test_field_axioms(field, rng):
    _check_axioms(field, rng)


def test_rational_field_axioms(rng):
    _check_axioms(RationalField(), rng)


def test_q_omega_cube_root():
    K = ExtensionField(RationalField(), modulus=[1, 1, 1])
    w = K.gen
    assert not K.eq(w, K.one)
    assert K.eq(w ** 3, K.one)
    assert K.eq(w * w + w + K.one, K.zero)


def test_extension_size_and_frobenius(rng):
    K = extension_tower(PrimeField(7), 2)
    assert K.size() == 49
    assert len(list(K.elements())) == 49
    for _ in range(10):
        a = K.random_element(rng)
        assert K.eq(K.frobenius(K.frobenius(a)), a)


def test_sqrt_in_extension(rng):
    K = extension_tower(PrimeField(11), 2)
    for _ in range(10):
        a = K.random_element(rng)
        r = K.sqrt(a * a)
        assert r is not None
        assert K.eq(r * r, a * a)


def test_prime_field_rejects_small_or_composite():
    for p in (2, 3, 4, 91):
        with pytest.raises(FieldConstructionError):
            PrimeField(p)


def test_rational_base_needs_modulus():
    with pytest.raises(FieldConstructionError):
        ExtensionField(RationalField(), degree=2)


def test_reducible_modulus_rejected():
    # θ² − 1 = (θ − 1)(θ + 1)
    with pytest.raises(FieldConstructionError):
        ExtensionField(PrimeField(7), modulus=[-1, 0, 1])


def test_parse_field():
    assert parse_field("QQ") == RationalField()
    assert parse_field("101") == PrimeField(101)
    assert parse_field("GF(101)") == PrimeField(101)
    K = parse_field("GF(7^2)")
    assert K.size() == 49
    with pytest.raises(FieldConstructionError):
        parse_field("banana")


def test_rational_function_valuation():
    FT = RationalFunctionField(PrimeField(101))
    t = FT.t
    assert FT.valuation(t ** 3) == 3
    assert FT.valuation(FT.inv(t * t)) == -2
    assert FT.valuation(FT.zero) is None
    f = (t + FT.one) / (t - FT.one)
    assert FT.base.eq(FT.evaluate(f, FT.base.convert(0)), FT.base.convert(-1))


def test_random_elements_reproducible():
    F = PrimeField(101)
    a = [F.key(F.random_element(random.Random(5))) for _ in range(3)]
    b = [F.key(F.random_element(random.Random(5))) for _ in range(3)]
    assert a == b


@pytest.mark.parametrize("F", [PrimeField(101), ExtensionField(PrimeField(7), 2)], ids=["F101", "GF49"])
def test_roots_match_exhaustive_search(F, rng):
    from core import univariate as up
    for _ in range(5):
        poly = [F.random_element(rng) for _ in range(6)] + [F.one]
        expected = sorted((a for a in F.elements() if F.is_zero(up.evaluate(poly, a, F))), key=F.key)
        assert [F.key(r) for r in up.roots(poly, F, rng)] == [F.key(r) for r in expected]
    # (T − 3)²(T − 5)：重根只出现一次
    three, five = F.convert(3), F.convert(5)
    poly = up.mul(up.mul([-three, F.one], [-three, F.one], F), [-five, F.one], F)
    assert [F.key(r) for r in up.roots(poly, F)] == sorted([F.key(three), F.key(five)])

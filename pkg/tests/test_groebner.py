import sympy

from core.fields import PrimeField
from core.groebner import (AffineQuotient, GroebnerBasis, charpoly, factor_univariate, resultant,
                           symbols_for)
from core.polynomial import MultiPoly


def test_normal_form_is_zero_on_ideal(elliptic_quartic):
    C = elliptic_quartic
    gb = GroebnerBasis.from_polys(C.quadrics)
    F = C.field
    x = MultiPoly.variable(F, 4, 0)
    f = C.quadrics[0] * x * x + C.quadrics[1] * MultiPoly.variable(F, 4, 3) ** 2
    assert gb.normal_form_homogeneous(f).is_zero()
    assert not gb.is_one()


def test_affine_quotient_dimension_counts_points():
    F = PrimeField(101)
    x, y = symbols_for(2)
    # x² = 1, y = x：两个点
    A = AffineQuotient([x ** 2 - 1, y - x], (x, y), F)
    assert A.dimension() == 2
    assert not A.is_empty()


def test_charpoly_of_multiplication_matrix():
    F = PrimeField(101)
    x, y = symbols_for(2)
    A = AffineQuotient([x ** 2 - 4, y - 1], (x, y), F)
    M = A.multiplication_matrix(x)
    roots = sorted(F.key(-fac[0]) for fac, _ in factor_univariate(charpoly(M, F), F))
    assert roots == [2, 99]


def test_factor_univariate_multiplicities():
    F = PrimeField(101)
    # (t − 1)² (t² + 1)，101 ≡ 1 (mod 4) 所以 t² + 1 可分
    poly = [F.convert(c) for c in (1, -2, 2, -2, 1)]
    factors = factor_univariate(poly, F)
    assert sum((len(f) - 1) * e for f, e in factors) == 4
    assert any(e == 2 and len(f) == 2 for f, e in factors)


def test_resultant_eliminates_variable():
    F = PrimeField(101)
    x, y = sympy.symbols("x y")
    # x = y², x = 1  ->  y² − 1
    res = resultant(x - y ** 2, x - 1, x, F, y)
    assert len(res) == 3
    assert F.is_zero(res[0] + res[2])


def test_resultant_over_prime_field_keeps_second_variable():
    F = PrimeField(101)
    x, y = sympy.symbols("x y")
    # Res_x(x² + y, x − y) = y² + y，y 出现在系数里
    res = resultant(x ** 2 + y, x - y, x, F, y)
    assert [F.key(c) for c in res] == [0, 1, 1]
    # 两条四次曲线只在原点相交 16 次
    k = y - x ** 4
    f = y - x ** 4 + y ** 4
    ry = resultant(k, f, x, F, y)
    assert len(ry) == 17
    assert all(F.is_zero(c) for c in ry[:16])
    facs = factor_univariate(ry, F)
    assert len(facs) == 1 and facs[0][1] == 16


def test_resultant_over_rationals():
    from core.fields import RationalField
    Q = RationalField()
    x, y = sympy.symbols("x y")
    res = resultant(x ** 2 + y, x - y, x, Q, y)
    assert res == [Q.zero, Q.one, Q.one]

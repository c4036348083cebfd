from core.curves import random_curve_point
from core.series import newton_branch, s_inv, s_mul, s_pow, valuation


def _series_with_valuation(F, v, N, rng):
    a = [F.zero] * (N + 1)
    a[v] = F.one
    for i in range(v + 1, N + 1):
        a[i] = F.random_element(rng)
    return a


def test_valuation_is_additive(F101, rng):
    N = 12
    for va, vb in [(0, 0), (1, 2), (3, 4), (0, 5)]:
        a = _series_with_valuation(F101, va, N, rng)
        b = _series_with_valuation(F101, vb, N, rng)
        assert valuation(s_mul(a, b, F101, N), F101) == va + vb


def test_valuation_of_zero_is_none(F101):
    assert valuation([F101.zero] * 5, F101) is None


def test_inverse_of_unit(F101, rng):
    N = 10
    a = _series_with_valuation(F101, 0, N, rng)
    one = s_mul(a, s_inv(a, F101, N), F101, N)
    assert F101.eq(one[0], F101.one)
    assert all(F101.is_zero(c) for c in one[1:])


def test_power_matches_repeated_product(F101, rng):
    N = 8
    a = _series_with_valuation(F101, 1, N, rng)
    assert [F101.key(c) for c in s_pow(a, 3, F101, N)] == \
           [F101.key(c) for c in s_mul(s_mul(a, a, F101, N), a, F101, N)]


def test_newton_branch_satisfies_quadrics(elliptic_quartic, rng):
    C = elliptic_quartic
    q = random_curve_point(C, rng)
    N = 10
    series = newton_branch(C.quadrics, q.coords, C.field, N)
    for Q in C.quadrics:
        assert valuation(series.compose(Q, N), C.field) is None
    g1 = series.term(1)
    assert any(not C.field.is_zero(c) for c in g1)

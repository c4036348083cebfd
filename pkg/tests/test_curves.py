import pytest

from core.curves import (INFINITE, build_curve, divisor_on_curve, graded_ideal_piece, local_series,
                         sample_points, tangent_and_osculating, vanishing_order)
from core.errors import ContractViolationError, CurveConstructionError
from core.polynomial import MultiPoly, monomials, piece_dim
from core.series import valuation


def _random_form(F, degree, rng):
    return MultiPoly.from_vector(F, 4, degree, [F.random_element(rng) for _ in monomials(4, degree)])


@pytest.mark.parametrize("name, d, g", [("twisted-cubic", 3, 0), ("rational-quartic", 4, 0),
                                        ("elliptic-quartic", 4, 1)])
def test_sections_dimension(F101, name, d, g):
    C = build_curve(name, F101)
    assert (C.degree, C.genus) == (d, g)
    for k in (2, 3, 4):
        assert piece_dim(4, k) - graded_ideal_piece(C, k).dim == d * k + 1 - g


def test_elliptic_quartic_ideal_in_degree_four(elliptic_quartic):
    assert graded_ideal_piece(elliptic_quartic, 4).dim == 19
    assert graded_ideal_piece(elliptic_quartic, 2).dim == 2


def test_ideal_vanishes_on_sampled_points(twisted_cubic):
    I3 = graded_ideal_piece(twisted_cubic, 3)
    for pt in sample_points(twisted_cubic, 6, max_ext=1):
        for f in I3.polys():
            assert twisted_cubic.field.is_zero(f.evaluate(pt.coords))


def test_divisor_degree_on_twisted_cubic(twisted_cubic, rng):
    for k in (1, 2):
        f = _random_form(twisted_cubic.field, k, rng)
        assert divisor_on_curve(f, twisted_cubic).total_degree == 3 * k


def test_divisor_degree_on_elliptic_quartic(elliptic_quartic, rng):
    f = _random_form(elliptic_quartic.field, 1, rng)
    assert divisor_on_curve(f, elliptic_quartic).total_degree == 4


def test_coordinate_plane_meets_twisted_cubic_once(twisted_cubic):
    F = twisted_cubic.field
    x = MultiPoly.variable(F, 4, 0)
    q = twisted_cubic.point_at((0, 1))
    D = divisor_on_curve(x, twisted_cubic)
    assert D.is_multiple_of(q, 3)
    assert vanishing_order(x, twisted_cubic, q) == 3


def test_divisor_of_ideal_member_is_rejected(twisted_cubic):
    f = graded_ideal_piece(twisted_cubic, 2).polys()[0]
    assert vanishing_order(f, twisted_cubic, twisted_cubic.point_at((1, 1))) == INFINITE
    with pytest.raises(ContractViolationError):
        divisor_on_curve(f, twisted_cubic)


def test_local_series_lies_on_curve(elliptic_quartic, twisted_cubic):
    for C in (elliptic_quartic, twisted_cubic):
        q = sample_points(C, 1, max_ext=1)[0]
        series = local_series(C, q, 8)
        for f in graded_ideal_piece(C, 2).polys():
            assert valuation(series.compose(f), series.field) is None


def test_tangent_and_osculating_plane_at_origin(twisted_cubic):
    F = twisted_cubic.field
    q = twisted_cubic.point_at((0, 1))
    data = tangent_and_osculating(twisted_cubic, q)
    assert data.osculating.proportional(MultiPoly.linear(F, [1, 0, 0, 0]))
    assert [F.key(c) for c in data.direction][:2] == [0, 0]
    assert not data.degenerate


def test_dependent_forms_are_rejected(F101):
    with pytest.raises(CurveConstructionError):
        build_curve({"variant": "parametric", "forms": ["s**3", "s**2*u", "s**2*u", "u**3"]}, F101)


def test_unknown_builtin_and_singular_weierstrass(F101):
    with pytest.raises(CurveConstructionError):
        build_curve("no-such-curve", F101)
    with pytest.raises(CurveConstructionError):
        build_curve({"variant": "weierstrass", "a": 0, "b": 0}, F101)

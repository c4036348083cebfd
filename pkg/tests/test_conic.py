import pytest

from core.conic import (LimitDirection, VertexTag, classify_vertex, conic_system, conic_systems_equal,
                        cone_equation, dominance_count, dphi_corank, gamma_dim, generic_trials,
                        injectivity_spot_check, limit_cone, limit_conic_system, random_cone,
                        random_direction, random_u_point, remark_dimensions, wspace)
from core.curves import build_curve, graded_ideal_piece, random_curve_point
from core.errors import AmbiguousConeError, GenericityError, ZeroClassError
from core.fields import PrimeField
from core.intersection import castelnuovo_bound


def test_wspace_vanishes_at_vertex(F101):
    p = (3, 1, 4, 1)
    W = wspace(p, F101)
    assert W.dim == 3
    for h in W.polys():
        assert F101.is_zero(h.evaluate(p))


def test_classify_twisted_cubic(twisted_cubic):
    off = classify_vertex(twisted_cubic, (1, 0, 0, 1))
    assert off.tag == VertexTag.U and off.witness == 1 and not off.on_curve
    on = classify_vertex(twisted_cubic, (0, 0, 0, 1))
    assert on.tag == VertexTag.CPRIME and on.witness == 3 and on.on_curve


def test_classify_elliptic_quartic(elliptic_quartic):
    assert classify_vertex(elliptic_quartic, (1, 1, 1, 1)).tag == VertexTag.U
    # (1:0:0:0) 是 Q1 − Q2 的顶点
    vc = classify_vertex(elliptic_quartic, (1, 0, 0, 0))
    assert vc.tag == VertexTag.S
    assert vc.witness >= 6
    assert (vc.e, vc.r) == (2, 2)


def test_cone_equation_is_cone_through_curve(elliptic_quartic):
    C = elliptic_quartic
    F = C.field
    p = (1, 1, 1, 1)
    f = cone_equation(C, p)
    assert f.degree == 4
    assert graded_ideal_piece(C, 4).contains(f)
    for i in range(4):
        for j in range(4):
            assert F.is_zero(f.partial(i).partial(j).evaluate(p))


def test_cone_equation_on_curve_drops_degree(twisted_cubic):
    f = cone_equation(twisted_cubic, (0, 0, 0, 1))
    assert f.degree == 2
    assert graded_ideal_piece(twisted_cubic, 2).contains(f)


def test_cone_equation_ambiguous_in_s(elliptic_quartic):
    with pytest.raises(AmbiguousConeError) as info:
        cone_equation(elliptic_quartic, (1, 0, 0, 0))
    assert info.value.intersection.dim >= 6


@pytest.mark.parametrize("p, tag", [((1, 1, 1, 1), VertexTag.U)])
def test_conic_dimensions_elliptic_quartic(elliptic_quartic, p, tag):
    dims = remark_dimensions(4, tag)
    assert dims == {3: 10, 4: 14}
    for k, expected in dims.items():
        assert conic_system(elliptic_quartic, p, k).dim == expected


def test_conic_dimensions_twisted_cubic(twisted_cubic):
    assert remark_dimensions(4, VertexTag.CPRIME) == {3: 9, 4: 12}
    for p, tag in [((1, 0, 0, 1), VertexTag.U), ((0, 0, 0, 1), VertexTag.CPRIME)]:
        for k, expected in remark_dimensions(3, tag).items():
            assert conic_system(twisted_cubic, p, k).dim == expected


def test_twisted_cubic_cone_map_is_three_to_one():
    F7 = PrimeField(7)
    C = build_curve("twisted-cubic", F7)
    same = [b for b in range(1, 7) if conic_systems_equal(C, (1, 0, 0, -1), (b, 0, 0, -1), 3)]
    assert same == [1, 2, 4]


def test_injectivity_on_elliptic_quartic(elliptic_quartic):
    assert injectivity_spot_check(elliptic_quartic, 3, trials=3)


def test_gamma_and_corank_on_twisted_cubic(twisted_cubic, rng):
    p = random_u_point(twisted_cubic, rng)
    assert gamma_dim(twisted_cubic, p) >= 1
    g = random_cone(twisted_cubic, p, rng)
    assert dphi_corank(twisted_cubic, p, g) == 2


def test_corank_of_elliptic_quartic_generic(elliptic_quartic):
    def trial(rng):
        p = random_u_point(elliptic_quartic, rng)
        m = dphi_corank(elliptic_quartic, p, random_cone(elliptic_quartic, p, rng))
        return m == 1, m

    summary = generic_trials(trial, trials=4, label="corank")
    assert summary.successes >= 1


def test_cone_itself_is_rejected(elliptic_quartic):
    p = (1, 1, 1, 1)
    with pytest.raises(ZeroClassError):
        dphi_corank(elliptic_quartic, p, cone_equation(elliptic_quartic, p))


def test_dominance_only_up_to_quartics():
    for d in range(3, 9):
        for g in range(castelnuovo_bound(d) + 1):
            assert dominance_count(d, g).dominant_possible == (d <= 4)


# ==================== 极限锥与极限线性系 ====================

CURVES = ["twisted_cubic", "elliptic_quartic"]


@pytest.mark.parametrize("curve", CURVES)
@pytest.mark.parametrize("seed", [1, 2])
def test_limit_cone_is_cone_times_plane(request, curve, seed):
    C = request.getfixturevalue(curve)

    def trial(rng):
        res = limit_cone(C, random_direction(C, rng), seed=rng.randrange(1 << 30))
        assert res.limit_cone.degree == C.degree
        # p ∈ C′：f_p 为 d−1 次，极限锥 = f_p·h，h 为平面 ⟨ℓ, t_p⟩ = {y = 0}
        assert res.cone_factor.degree == C.degree - 1
        return res.exponent == 1 and res.plane_matches, res.exponent

    summary = generic_trials(trial, trials=3, seed=seed, label="limit cone")
    assert summary.successes >= 1
    assert all(v in (None, 1) for v in summary.values)


@pytest.mark.parametrize("curve", CURVES)
def test_limit_cone_along_tangent_gives_osculating_plane(request, curve):
    C = request.getfixturevalue(curve)

    def trial(rng):
        direction = LimitDirection(tuple(random_curve_point(C, rng).coords))
        res = limit_cone(C, direction, seed=rng.randrange(1 << 30))
        return res.plane_matches and res.exponent == 1, res.plane.to_str()

    assert generic_trials(trial, trials=3, seed=5, label="tangent").successes >= 1


LIMIT_DIMS = {
    "twisted_cubic": {2: 6, 3: 9},
    "elliptic_quartic": {3: 10, 4: 14},
}


@pytest.mark.parametrize("curve", CURVES)
@pytest.mark.parametrize("seed", [1, 2])
def test_limit_conic_system_dimensions(request, curve, seed):
    C = request.getfixturevalue(curve)
    d = C.degree
    for k, gap in [(d - 1, 1), (d, 2)]:
        def trial(rng, k=k, gap=gap):
            sys = limit_conic_system(C, random_direction(C, rng), k, seed=rng.randrange(1 << 30))
            if sys.closed_form is None:
                raise GenericityError(f"flags {sys.flags}")
            assert sys.ledger["contains_R_k(p)"]
            ok = sys.dim - sys.ledger["R_k(p)"] == gap and sys.closed_form == sys.basis
            return ok, sys

        summary = generic_trials(trial, trials=3, seed=seed, label=f"R^l_{k}")
        assert summary.successes >= 1
        sys = summary.first_witness
        assert sys.dim == LIMIT_DIMS[curve][k]
        if k == d:
            assert sys.min_order == d - 2
            assert sys.ledger["min_order_exact"]


def test_limit_system_xi_case_on_elliptic_quartic(elliptic_quartic):
    C = elliptic_quartic

    def trial(rng):
        sys = limit_conic_system(C, random_direction(C, rng), 4, seed=rng.randrange(1 << 30))
        if sys.closed_form is None:
            raise GenericityError(f"flags {sys.flags}")
        return True, sys.ledger["xi_case"]

    summary = generic_trials(trial, trials=3, seed=3, label="xi")
    assert summary.first_witness == "ii"


def test_limit_system_below_d_minus_one_is_unchanged(elliptic_quartic):
    def trial(rng):
        sys = limit_conic_system(elliptic_quartic, random_direction(elliptic_quartic, rng), 2,
                                 seed=rng.randrange(1 << 30))
        return sys.closed_form == sys.basis and sys.dim == sys.ledger["R_k(p)"], sys.dim

    summary = generic_trials(trial, trials=3, seed=4, label="R^l_2")
    assert summary.successes >= 1
    assert summary.first_witness == 6


# ==================== 秩的下界 ====================

@pytest.mark.parametrize("curve, bound", [("elliptic_quartic", 2), ("rational_quartic", 3)])
def test_gamma_dimension_bounds(request, curve, bound):
    C = request.getfixturevalue(curve)

    def trial(rng):
        value = gamma_dim(C, random_u_point(C, rng))
        return value >= bound, value

    summary = generic_trials(trial, trials=10, label="gamma")
    assert summary.successes >= 1
    assert all(v is None or v <= bound for v in summary.values)


def test_rational_quartic_cone_map_is_submersive(rational_quartic):
    def trial(rng):
        p = random_u_point(rational_quartic, rng)
        m = dphi_corank(rational_quartic, p, random_cone(rational_quartic, p, rng))
        return m == 0, m

    summary = generic_trials(trial, trials=10, label="corank")
    assert summary.successes >= 1
    assert dominance_count(4, 0).dominant_possible

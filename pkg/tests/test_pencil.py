import random

import pytest

import config
import core.pencil as pencil_mod
from core.conic import vertex_frame
from core.elliptic import GoldenCertificate, ec_scalar_mul
from core.errors import ContractViolationError, EmptyScanError, SearchBudgetError
from core.fields import PrimeField
from core.pencil import (Pencil, base_locus_record, irreducibility_record, is_smooth_plane_curve,
                         locate_witness, member_is_absolutely_irreducible, non_isotrivial_record,
                         osculating_quartic, osculating_residual, run_pipeline, search_vertices,
                         smooth_member_record, vertex_conditions)
from core.polynomial import MultiPoly


def _plane(F, text_terms):
    return MultiPoly(F, 3, 4, {e: F.convert(c) for e, c in text_terms.items()})


def test_fermat_quartic_is_smooth_and_irreducible():
    F = PrimeField(101)
    fermat = _plane(F, {(4, 0, 0): 1, (0, 4, 0): 1, (0, 0, 4): 1})
    assert is_smooth_plane_curve(fermat)
    assert member_is_absolutely_irreducible(fermat, F, random.Random(1)) is True


def test_cone_over_binary_quartic_is_singular():
    F = PrimeField(101)
    assert not is_smooth_plane_curve(_plane(F, {(4, 0, 0): 1, (0, 4, 0): 1}))


def test_product_of_conics_is_reducible():
    F = PrimeField(101)
    x, y, z = (MultiPoly.variable(F, 3, i) for i in range(3))
    A = x * x + y * y - z * z
    B = x * x + (y * y).scale(2) - (z * z).scale(3)
    assert member_is_absolutely_irreducible(A * B, F, random.Random(2)) is False


def test_vertex_conditions_contain_ideal_cones(elliptic_quartic):
    from core.curves import sample_points
    C = elliptic_quartic
    q = sample_points(C, 1, max_ext=1)[0]
    sol = vertex_conditions(C, (1, 1, 1, 1), q, m=4)
    # W(p)_4 有 15 维，4 个条件至多降 4 维
    assert sol.dim >= 11


def test_explicit_region_without_witness_returns_empty(elliptic_quartic):
    from core.curves import sample_points
    C = elliptic_quartic
    q = sample_points(C, 1, max_ext=1)[0]
    assert search_vertices(C, q, region=[(1, 1, 1, 1)]) == []


@pytest.mark.slow
def test_full_pipeline_certifies_pencil():
    result = run_pipeline()
    assert result.golden.verify()
    assert result.certificate.passed
    search = result.search
    assert osculating_quartic(search.curve, search.q).order_on_projection == 12
    assert osculating_residual(search.curve, search.q).multiplicity_at(search.q) == 3


# ==================== 证书记录 ====================

def _handmade_pencil(F, k_terms, f_terms):
    """k = yz³ − x⁴ 与 f = k + y⁴ 只在 (0:0:1) 相交，交数 I(y − x⁴, y⁴) = 16"""
    origin = (F.zero, F.zero, F.one)
    return Pencil(_plane(F, k_terms), _plane(F, f_terms), origin, vertex_frame([0, 0, 0, 1], F), (0, 0, 0, 1))


K_TERMS = {(0, 1, 3): 1, (4, 0, 0): -1}
F_TERMS = {(0, 1, 3): 1, (4, 0, 0): -1, (0, 4, 0): 1}
# x²y² + x²z² + y²z² + 2z⁴：只在 (1:0:0)、(0:1:0) 有结点
BINODAL = {(2, 2, 0): 1, (2, 0, 2): 1, (0, 2, 2): 1, (0, 0, 4): 2}


def test_base_locus_is_single_sixteenfold_point():
    F = PrimeField(101)
    rec = base_locus_record(_handmade_pencil(F, K_TERMS, F_TERMS), random.Random(3))
    assert rec.passed
    assert any("Res_x" in line for line in rec.evidence)


def test_base_locus_fails_when_cones_coincide():
    F = PrimeField(101)
    rec = base_locus_record(_handmade_pencil(F, K_TERMS, {e: 3 * c for e, c in K_TERMS.items()}),
                            random.Random(3))
    assert not rec.passed


def test_smooth_member_found():
    F = PrimeField(101)
    pencil = _handmade_pencil(F, K_TERMS, F_TERMS)
    rec, param = smooth_member_record(pencil, random.Random(4))
    assert rec.passed and param is not None
    assert is_smooth_plane_curve(pencil.member(*param))


def test_non_isotrivial_needs_binodal_member():
    F = PrimeField(101)
    rng = random.Random(5)
    pencil = _handmade_pencil(F, K_TERMS, BINODAL)
    assert non_isotrivial_record(pencil, (F.one, F.one), rng).passed
    # f_p 为 0 倍时光滑成员就是 f_p 本身
    assert not non_isotrivial_record(pencil, (F.zero, F.one), rng).passed
    smooth_f = _handmade_pencil(F, K_TERMS, F_TERMS)
    assert not non_isotrivial_record(smooth_f, (F.one, F.one), rng).passed


def test_irreducibility_rests_on_torsion_certificate():
    cert = GoldenCertificate.load(config.GOLDEN_PATH)
    F = PrimeField(cert.p)
    pencil = _handmade_pencil(F, K_TERMS, F_TERMS)
    rec = irreducibility_record(pencil, cert.curve, cert.point, random.Random(6), members=2)
    assert rec.passed
    # (−1 : 1) 成员是 y⁴，没有光滑点，只能记为次要失败
    assert rec.needs_review
    eighth = ec_scalar_mul(cert.curve, cert.point, 2)
    assert not irreducibility_record(pencil, cert.curve, eighth, random.Random(6), members=0).passed


# ==================== 素数升级 ====================

def test_empty_scan_climbs_then_exhausts_ladder(monkeypatch):
    cert = GoldenCertificate.load(config.GOLDEN_PATH)

    def empty(C, q, **kwargs):
        raise EmptyScanError("nothing", prime=C.field.characteristic)

    monkeypatch.setattr(pencil_mod, "search_vertices", empty)
    with pytest.raises(SearchBudgetError) as info:
        locate_witness(golden=cert, primes=[cert.p])
    assert info.value.resume_token["attempts"] == {cert.p: 0}


def test_witness_contract_violation_is_not_swallowed(monkeypatch):
    cert = GoldenCertificate.load(config.GOLDEN_PATH)

    def broken(C, q, **kwargs):
        raise ContractViolationError("g 截出的除子不是 16q")

    monkeypatch.setattr(pencil_mod, "search_vertices", broken)
    with pytest.raises(ContractViolationError) as info:
        locate_witness(golden=cert, primes=[cert.p])
    assert not isinstance(info.value, SearchBudgetError)

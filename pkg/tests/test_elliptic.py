import math
import os
import random

import pytest

import config
from core.curves import CurvePoint
from core.elliptic import (IDENTITY, EPoint, GoldenCertificate, WeierstrassCurve, ec_scalar_mul, embed_by_4O,
                           embed_point, find_point_of_order, flex_diagnostic, lin_equiv_cert,
                           point_from_curve, point_order, quadric_pencil_singular_members)
from core.errors import ContractViolationError, CurveConstructionError, SearchBudgetError


@pytest.fixture(scope="module")
def E():
    return WeierstrassCurve(101, 1, 1)


def test_hasse_bound(E):
    N = E.order()
    assert abs(N - 102) <= 2 * math.isqrt(101) + 2
    assert N == 1 + len(list(E.points()))


def test_group_law(E):
    rng = random.Random(7)
    P, Q, R = (E.random_point(rng) for _ in range(3))
    assert E.add(E.add(P, Q), R) == E.add(P, E.add(Q, R))
    assert E.add(P, Q) == E.add(Q, P)
    assert E.add(P, E.neg(P)) == IDENTITY
    assert E.add(P, IDENTITY) == P
    assert ec_scalar_mul(E, P, E.order()).is_identity


def test_scalar_mul_matches_repeated_addition(E):
    P = next(E.points())
    acc = IDENTITY
    for n in range(1, 12):
        acc = E.add(acc, P)
        assert ec_scalar_mul(E, P, n) == acc
    assert ec_scalar_mul(E, P, -3) == E.neg(ec_scalar_mul(E, P, 3))


def test_point_order_divides_group_order(E):
    for P in list(E.points())[:10]:
        n = point_order(E, P)
        assert E.order() % n == 0
        assert ec_scalar_mul(E, P, n).is_identity


def test_singular_and_bad_prime_rejected():
    with pytest.raises(CurveConstructionError):
        WeierstrassCurve(101, 0, 0)
    with pytest.raises(CurveConstructionError):
        WeierstrassCurve(91, 1, 1)


def test_scalar_mul_rejects_foreign_point(E):
    bad = EPoint(0, 0)
    if E.contains(bad):
        pytest.skip("(0, 0) 恰好在曲线上")
    with pytest.raises(ContractViolationError):
        ec_scalar_mul(E, bad, 2)


def test_small_order_search_and_certificate():
    w = find_point_of_order(n=4, primes=[37, 41, 43], curves_per_prime=50, seed=3)
    assert w.n == 4
    cert = GoldenCertificate.from_witness(w)
    assert cert.verify()
    assert GoldenCertificate.from_text(cert.to_text()) == cert
    full, half = lin_equiv_cert(cert.curve, cert.point, 4)
    assert full and not half
    wrong = GoldenCertificate(cert.p, cert.a, cert.b, cert.qx, cert.qy, order=8)
    assert not wrong.verify()


def test_certificate_file_round_trip(tmp_path):
    cert = GoldenCertificate(37, 1, 3, 0, 15)
    path = tmp_path / "golden.txt"
    cert.save(str(path))
    assert GoldenCertificate.load(str(path)) == cert


def test_malformed_certificate():
    with pytest.raises(ContractViolationError):
        GoldenCertificate.from_text("p=37\na=1\n")


def test_search_budget_gives_resume_token():
    with pytest.raises(SearchBudgetError) as info:
        find_point_of_order(n=64, primes=[37], curves_per_prime=5, seed=1, budget=3)
    token = info.value.resume_token
    assert token["prime"] == 37 and token["index"] == 3


def test_embedding_by_4O(E):
    C = embed_by_4O(E)
    for P in list(E.points())[:20] + [IDENTITY]:
        pt = embed_point(E, P, C)
        assert C.contains_point(pt)
        assert point_from_curve(E, pt) == P


def test_origin_is_a_flex(E):
    assert flex_diagnostic(embed_by_4O(E)) == 4
    O = CurvePoint((0, 0, 0, 1), embed_by_4O(E).field)
    assert point_from_curve(E, O) == IDENTITY


def test_quadric_pencil_has_four_singular_members(E):
    members = quadric_pencil_singular_members(embed_by_4O(E), classify=False)
    assert len(members) == 4


@pytest.mark.slow
def test_order_sixteen_search():
    w = find_point_of_order(seed=20240611)
    assert GoldenCertificate.from_witness(w).verify()


def test_committed_golden_certificate():
    assert os.path.exists(config.GOLDEN_PATH)
    cert = GoldenCertificate.load(config.GOLDEN_PATH)
    assert (cert.p, cert.a, cert.b, cert.qx, cert.qy, cert.order) == (37, 1, 1, 1, 15, 16)
    assert cert.verify()
    E, q = cert.curve, cert.point
    assert E.order() % 16 == 0
    assert ec_scalar_mul(E, q, 16).is_identity
    assert not ec_scalar_mul(E, q, 8).is_identity
    # 4q ≠ O，所以 4q 与 4O 不线性等价
    assert not ec_scalar_mul(E, q, 4).is_identity
    C = embed_by_4O(E)
    pt = embed_point(E, q, C)
    assert C.contains_point(pt)
    assert point_from_curve(E, pt) == q
    with open(config.GOLDEN_PATH, encoding="utf-8") as f:
        assert f.read() == cert.to_text()

import pytest

from core.errors import FlatLimitError
from core.fields import PrimeField, RationalFunctionField
from core.linalg import (GradedPiece, ParamSubspace, SubspaceBasis, SubspaceRelation, det, divide_exact,
                         flat_limit_kernel, flat_limit_subspace, inverse, kernel_vectors, mat_mul, rank,
                         rref, solve_in_span, subspace_compare)
from core.polynomial import MultiPoly


def _random_matrix(F, n, m, rng):
    return [[F.random_element(rng) for _ in range(m)] for _ in range(n)]


def test_rref_idempotent(F101, rng):
    M = _random_matrix(F101, 5, 7, rng)
    R, r = rref(M, F101)
    R2, r2 = rref(R, F101)
    assert r == r2
    assert [[F101.key(x) for x in row] for row in R] == [[F101.key(x) for x in row] for row in R2]


def test_rank_nullity(F101, rng):
    M = _random_matrix(F101, 3, 6, rng)
    M.append([a + b for a, b in zip(M[0], M[1])])
    assert rank(M, F101) == 3
    K = kernel_vectors(M, F101, 6)
    assert len(K) == 3
    for v in K:
        for row in M:
            assert F101.is_zero(sum((a * b for a, b in zip(row, v)), F101.zero))


def test_inverse_and_det(F101, rng):
    M = _random_matrix(F101, 4, 4, rng)
    if F101.is_zero(det(M, F101)):
        pytest.skip("随机矩阵奇异")
    P = mat_mul(M, inverse(M, F101), F101)
    for i in range(4):
        for j in range(4):
            assert F101.eq(P[i][j], F101.one if i == j else F101.zero)


def test_singular_inverse_raises(F101):
    with pytest.raises(ZeroDivisionError):
        inverse([[1, 2], [2, 4]], F101)


def test_solve_in_span(F101):
    vecs = [[1, 0, 1], [0, 1, 1]]
    lam = solve_in_span(vecs, [3, 4, 7], F101)
    assert [F101.key(x) for x in lam] == [3, 4]
    assert solve_in_span(vecs, [0, 0, 1], F101) is None


def test_subspace_compare_relations(F101):
    A = SubspaceBasis(F101, 3, [[1, 0, 0], [0, 1, 0]])
    B = SubspaceBasis(F101, 3, [[1, 1, 0]])
    C = SubspaceBasis(F101, 3, [[0, 0, 1]])
    assert subspace_compare(A, B).relation == SubspaceRelation.A_CONTAINS_B
    assert subspace_compare(B, A).relation == SubspaceRelation.B_CONTAINS_A
    assert subspace_compare(A, A).relation == SubspaceRelation.EQUAL
    r = subspace_compare(A, C)
    assert r.relation == SubspaceRelation.INCOMPARABLE
    assert r.dim_sum == 3 and r.dim_intersection == 0
    assert A.intersection(B) == B


def test_divide_exact(F101):
    x, y = MultiPoly.variable(F101, 4, 0), MultiPoly.variable(F101, 4, 1)
    f = (x + y) * (x - y)
    assert divide_exact(f, x + y) == x - y
    assert divide_exact(f, x) is None


def test_flat_limit_of_two_lines():
    F = PrimeField(101)
    FT = RationalFunctionField(F)
    t = FT.t
    # <(1, t, 0), (1, 0, t)> -> <(1, 0, 0), (0, 1, -1)>
    P = ParamSubspace.from_ratfunc_rows([[1, t, 0], [1, 0, t]], FT, expected_dim=2)
    limit = flat_limit_subspace(P)
    assert limit == SubspaceBasis(F, 3, [[1, 0, 0], [0, 1, -1]])


def test_flat_limit_clears_denominators():
    F = PrimeField(101)
    FT = RationalFunctionField(F)
    t = FT.t
    P = ParamSubspace.from_ratfunc_rows([[FT.inv(t), 1, 0]], FT)
    assert flat_limit_subspace(P) == SubspaceBasis(F, 3, [[1, 0, 0]])


def test_flat_limit_agrees_with_generic_dimension(rng):
    F = PrimeField(101)
    FT = RationalFunctionField(F)
    t = FT.t
    rows = [[t * t, 1, t, 0], [1, t, 0, t * t], [t + FT.one, t + FT.one, t, t * t]]
    P = ParamSubspace.from_ratfunc_rows(rows, FT)
    generic = P.specialize(F.convert(37)).dim
    assert flat_limit_subspace(P).dim == generic


def test_flat_limit_expected_dim_mismatch():
    F = PrimeField(101)
    FT = RationalFunctionField(F)
    P = ParamSubspace.from_ratfunc_rows([[1, FT.t, 0]], FT, expected_dim=2)
    with pytest.raises(FlatLimitError):
        flat_limit_subspace(P)


def test_flat_limit_kernel():
    F = PrimeField(101)
    FT = RationalFunctionField(F)
    t = FT.t
    # ker [1 t 0 0] 在 t -> 0 时趋于 ker [1 0 0 0]
    P = ParamSubspace.from_ratfunc_rows([[1, t, 0, 0]], FT)
    K = flat_limit_kernel(P, piece=GradedPiece(4, 1))
    assert K.dim == 3
    assert K.contains([0, 1, 0, 0])
    assert not K.contains([1, 0, 0, 0])

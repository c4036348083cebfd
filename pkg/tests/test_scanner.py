import numpy as np
import pytest

from core.curves import graded_ideal_piece, sample_points
from core.errors import UnsupportedFieldError
from core.fields import PrimeField, extension_tower
from core.curves import build_curve
from core.linalg import rank
from core.scanner import (batch_rank, inverse_table, osculating_space, point_count, points_from_index,
                          scan_vertices)


def test_batch_rank_agrees_with_exact_rank():
    P = 7
    F = PrimeField(P)
    gen = np.random.default_rng(11)
    M = gen.integers(0, P, size=(40, 5, 6), dtype=np.int64)
    # 一半矩阵人为降秩
    M[::2, 4] = (M[::2, 0] + 2 * M[::2, 1]) % P
    M[::4, 3] = 0
    got = batch_rank(M, P, inverse_table(P))
    for b in range(M.shape[0]):
        assert got[b] == rank(M[b].tolist(), F)


def test_batch_rank_of_zero_matrix():
    P = 11
    assert batch_rank(np.zeros((3, 4, 4), dtype=np.int64), P, inverse_table(P)).tolist() == [0, 0, 0]


def test_points_from_index_enumerates_projective_space():
    P = 5
    pts = points_from_index(np.arange(point_count(P), dtype=np.int64), P)
    assert len({tuple(p) for p in pts.tolist()}) == point_count(P) == 156
    for p in pts.tolist():
        lead = next(c for c in p if c)
        assert lead == 1


def test_osculating_space_dimension(elliptic_quartic):
    q = sample_points(elliptic_quartic, 1, max_ext=1)[0]
    T = osculating_space(elliptic_quartic, q, m=8)
    assert T.dim == 19 + 8
    assert T.contains_space(graded_ideal_piece(elliptic_quartic, 4))


def test_scan_requires_prime_field():
    C = build_curve("twisted-cubic", PrimeField(7)).extend_scalars(extension_tower(PrimeField(7), 2))
    with pytest.raises(UnsupportedFieldError):
        scan_vertices(C, (0, 0, 0, 1))

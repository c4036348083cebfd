import pytest

from core.conic import generic_trials, random_u_point
from core.errors import UnsupportedFieldError
from core.intersection import (blowup_product, castelnuovo_bound, cone_class, count_nodes,
                               count_ramification, exceptional_class, hyperplane_class, random_line)
from core.curves import build_curve
from core.fields import PrimeField


@pytest.mark.parametrize("d, g", [(3, 0), (4, 0), (4, 1), (5, 2), (6, 4), (8, 9)])
def test_blowup_numbers(d, g):
    M, L, E = cone_class(d, g), hyperplane_class(d, g), exceptional_class(d, g)
    assert blowup_product(M, L, E) == d
    assert blowup_product(M, M, E) == 2 * ((d - 1) ** 2 - g)


def test_blowup_basic_table():
    L, E = hyperplane_class(4, 1), exceptional_class(4, 1)
    assert blowup_product(L, L, L) == 1
    assert blowup_product(L, L, E) == 0
    assert blowup_product(L, E, E) == -4
    assert blowup_product(E, E, E) == -2 + 2 - 16


def test_blowup_rejects_wrong_codimension():
    L = hyperplane_class(3, 0)
    with pytest.raises(ValueError):
        blowup_product(L * L, L, L)
    with pytest.raises(ValueError):
        L + hyperplane_class(4, 1)


def test_castelnuovo_bound():
    assert [castelnuovo_bound(d) for d in range(3, 9)] == [0, 1, 2, 4, 6, 9]


@pytest.mark.parametrize("curve, expected", [("twisted-cubic", 1), ("elliptic-quartic", 2)])
def test_node_count(F101, curve, expected):
    C = build_curve(curve, F101)

    def trial(rng):
        res = count_nodes(C, random_u_point(C, rng), seed=rng.randrange(1 << 30))
        assert res.expected == expected
        return res.matches, res.count

    assert generic_trials(trial, trials=6, label="nodes").successes >= 1


@pytest.mark.parametrize("curve, expected", [("twisted-cubic", 4), ("rational-quartic", 6),
                                             ("elliptic-quartic", 8)])
def test_ramification_count(F101, curve, expected):
    C = build_curve(curve, F101)

    def trial(rng):
        res = count_ramification(C, random_line(C, rng), seed=rng.randrange(1 << 30))
        assert res.expected == expected
        return res.matches, res.count

    assert generic_trials(trial, trials=6, label="ramification").successes >= 1


def test_ramification_needs_large_characteristic():
    C = build_curve("twisted-cubic", PrimeField(5))
    with pytest.raises(UnsupportedFieldError):
        count_ramification(C)

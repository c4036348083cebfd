import pytest

from core.polynomial import MultiPoly, monomial_index, monomials, piece_dim, products


def _random_form(F, nvars, degree, rng):
    return MultiPoly.from_vector(F, nvars, degree, [F.random_element(rng) for _ in monomials(nvars, degree)])


def test_piece_dims():
    assert piece_dim(4, 2) == 10
    assert piece_dim(4, 4) == 35
    assert piece_dim(3, 3) == 10
    assert len(monomials(4, 3)) == piece_dim(4, 3)
    assert monomial_index(4, 1) == {m: i for i, m in enumerate(monomials(4, 1))}


def test_grevlex_order_starts_with_x():
    assert monomials(4, 2)[0] == (2, 0, 0, 0)
    assert monomials(4, 2)[-1] == (0, 0, 0, 2)


@pytest.mark.parametrize("degree", [1, 2, 4])
def test_euler_relation(F101, rng, degree):
    f = _random_form(F101, 4, degree, rng)
    acc = MultiPoly.zero(F101, 4, degree)
    for i in range(4):
        acc = acc + MultiPoly.variable(F101, 4, i) * f.partial(i)
    assert acc == f.scale(degree)


def test_shift_expand_matches_substitution(F101, rng):
    f = _random_form(F101, 4, 3, rng)
    c = F101.convert(17)
    layers = f.shift_expand(0, 3)
    acc = MultiPoly.zero(F101, 4, 3)
    for m, layer in enumerate(layers):
        acc = acc + layer.scale(c ** m)
    shifted = [MultiPoly.linear(F101, [1, 0, 0, c]),
               MultiPoly.variable(F101, 4, 1),
               MultiPoly.variable(F101, 4, 2),
               MultiPoly.variable(F101, 4, 3)]
    assert acc == f.substitute(shifted)


def test_evaluate_after_compose_matrix(F101, rng):
    f = _random_form(F101, 4, 2, rng)
    B = [[1, 2, 0, 0], [0, 1, 0, 0], [0, 0, 1, 5], [3, 0, 0, 1]]
    g = f.compose_matrix(B)
    y = [F101.convert(v) for v in (4, 7, 9, 1)]
    x = [sum((F101.convert(B[i][j]) * y[j] for j in range(4)), F101.zero) for i in range(4)]
    assert F101.eq(g.evaluate(y), f.evaluate(x))


def test_canonical_is_projective_representative(F101, rng):
    f = _random_form(F101, 4, 2, rng)
    g = f.scale(42)
    assert f.proportional(g)
    assert f.canonical() == g.canonical()
    assert F101.eq(f.canonical().leading()[1], F101.one)


def test_sympy_round_trip(F101, rng):
    import sympy
    gens = sympy.symbols("x y z w")
    f = _random_form(F101, 4, 3, rng)
    assert MultiPoly.from_sympy(f.to_sympy(gens), gens, F101, 3) == f


def test_products_span_symmetric_power(F101):
    forms = [MultiPoly.variable(F101, 4, i) for i in range(3)]
    assert len(products(forms, 2)) == piece_dim(3, 2)


def test_mixed_degree_monomial_rejected(F101):
    with pytest.raises(ValueError):
        MultiPoly(F101, 4, 2, {(1, 0, 0, 0): F101.one})


def test_drop_variable(F101):
    f = MultiPoly.linear(F101, [1, 2, 3, 0])
    assert f.drop_variable(3) == MultiPoly.linear(F101, [1, 2, 3])
    with pytest.raises(ValueError):
        MultiPoly.linear(F101, [1, 0, 0, 1]).drop_variable(3)

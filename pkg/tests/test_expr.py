"""Expression parser: canonical printing round-trips, errors carry positions."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spflab import expr as ex


def _random_tree(rng, depth):
    if depth <= 0:
        kind = rng.randrange(5)
        if kind == 0:
            return ex.Sym(rng.randint(1, 9))
        if kind == 1:
            return ex.Div(rng.randint(1, 9))
        if kind == 2:
            return ex.TensorPow(rng.randint(1, 9))
        if kind == 3:
            return ex.Ident()
        return ex.Frob(rng.randint(0, 3))
    kind = rng.randrange(6)
    if kind == 0:
        return ex.Dual(_random_tree(rng, depth - 1))
    if kind == 1:
        return ex.Twist(_random_tree(rng, depth - 1), rng.randint(0, 2))
    if kind == 2:
        return ex.Compose(_random_tree(rng, depth - 1), _random_tree(rng, depth - 1))
    if kind == 3:
        return ex.ParamSub(_random_tree(rng, depth - 1), rng.randint(1, 4))
    if kind == 4:
        return ex.ParamSup(_random_tree(rng, depth - 1), rng.randint(1, 4))
    factors = []
    for _ in range(rng.randint(2, 3)):
        t = _random_tree(rng, depth - 1)
        factors.extend(t.factors if isinstance(t, ex.Tensor) else [t])
    return ex.Tensor(tuple(factors))


def test_round_trip_corpus_of_200():
    rng = random.Random(20240801)
    for k in range(200):
        tree = _random_tree(rng, rng.randint(0, 3))
        printed = str(tree)
        assert ex.parse(printed) == tree, printed
        # printing is a fixed point
        assert str(ex.parse(printed)) == printed


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_round_trip_hypothesis(seed):
    rng = random.Random(seed)
    tree = _random_tree(rng, rng.randint(0, 3))
    assert ex.parse(str(tree)) == tree


@pytest.mark.parametrize(
    "text,line,col",
    [
        ("S^2 @ G^2", 1, 5),
        ("twist(S^2", 1, 10),
        ("compose(S^2 G^2)", 1, 13),
        ("bogus(3)", 1, 1),
        ("S^2 (*)", 1, 8),
        ("", 1, 1),
        ("S^2 )", 1, 5),
        ("\nS^2 ^", 2, 5),
    ],
)
def test_errors_carry_positions(text, line, col):
    with pytest.raises(ex.ExprError) as err:
        ex.parse(text)
    assert (err.value.line, err.value.col) == (line, col)
    assert f"line {line}, column {col}" in str(err.value)


def test_degree_arithmetic():
    assert ex.parse("S^3").degree(2) == 3
    assert ex.parse("I").degree(5) == 1
    assert ex.parse("frob(2)").degree(3) == 9
    assert ex.parse("twist(S^2, 1)").degree(2) == 4
    assert ex.parse("twist(G^3, 2)").degree(3) == 27
    assert ex.parse("compose(S^2, T^3)").degree(2) == 6
    assert ex.parse("S^2 (*) G^1 (*) I").degree(7) == 4
    assert ex.parse("dual(T^4)").degree(2) == 4
    assert ex.parse("param_sub(S^2, 3)").degree(2) == 2
    assert ex.parse("param_sup(G^2, 2)").degree(2) == 2


def test_tensor_flattening_and_whitespace():
    # tensor chains flatten left-to-right into a single node
    t = ex.parse("S^1 (*) S^1 (*) S^1")
    assert isinstance(t, ex.Tensor) and len(t.factors) == 3
    assert ex.parse(" S^2   (*)\n G^2 ") == ex.parse("S^2 (*) G^2")
    assert ex.parse("twist( S^2 ,  1 )") == ex.Twist(ex.Sym(2), 1)

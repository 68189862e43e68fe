"""Representing modules of functor constructions and the equivariant solver."""

import numpy as np
import pytest

from spflab import expr as ex
from spflab.combinat import divided_power_dim
from spflab.functors import (
    GuardError,
    build_module,
    evaluate,
    hom_space,
    kuhn_dual,
    parametrize_sub,
    parametrize_sup,
    submodule_generated,
    tensor,
    twist_module,
)

from conftest import bm

RECIPES = [
    "I",
    "S^2",
    "G^2",
    "T^2",
    "frob(1)",
    "dual(S^2)",
    "S^1 (*) G^1",
    "twist(S^2, 1)",
    "compose(S^2, G^2)",
    "param_sub(S^2, 2)",
    "param_sup(G^2, 2)",
]


@pytest.mark.parametrize("text", RECIPES)
@pytest.mark.parametrize("p", [2, 3])
def test_module_invariants(text, p):
    f = bm(text, p, 2)
    assert f.check_weights()
    assert f.check_algebra_action()
    d = ex.parse(text).degree(p)
    assert all(sum(w) == d for w in f.weights)
    assert sum(f.weight_dim(w) for w in set(f.weights)) == f.dim


@pytest.mark.parametrize("p,n", [(2, 2), (3, 2), (2, 3)])
def test_classical_dimensions(p, n):
    assert bm("S^2", p, n).dim == divided_power_dim(n, 2)
    assert bm("G^3", p, n).dim == divided_power_dim(n, 3)
    assert bm("T^2", p, n).dim == n * n
    assert bm("I", p, n).dim == n
    assert bm("frob(1)", p, n).dim == n  # twisted identity has the same space


def test_tensor_matches_tensor_power():
    for p in (2, 3):
        t2 = bm("T^2", p, 2)
        ii = bm("I (*) I", p, 2)
        assert ii.dim == t2.dim == 4
        # the two constructions are isomorphic: full hom spaces agree
        assert len(hom_space(ii, t2)) == len(hom_space(t2, t2))


def test_hom_space_endomorphism_oracles():
    # End(T^d) is the group algebra of the symmetric group S_d
    assert len(hom_space(bm("T^2", 2, 2), bm("T^2", 2, 2))) == 2
    assert len(hom_space(bm("S^2", 2, 2), bm("S^2", 2, 2))) == 1
    assert len(hom_space(bm("G^2", 3, 2), bm("G^2", 3, 2))) == 1
    assert len(hom_space(bm("G^2", 2, 2), bm("I (*) I", 2, 2))) == 1


def test_hom_maps_are_equivariant_and_independent():
    f, g = bm("S^2", 2, 2), bm("G^2", 2, 2)
    homs = hom_space(f, g)
    assert all(h.is_equivariant() for h in homs)
    if len(homs) > 1:
        stacked = np.stack([h.matrix.a.ravel() for h in homs])
        assert np.linalg.matrix_rank(stacked) == len(homs)


def test_kuhn_dual_is_involutive_and_contravariant():
    for text in ("S^2", "T^2", "G^2", "frob(1)"):
        f = bm(text, 2, 2)
        fd = kuhn_dual(f)
        assert fd.dim == f.dim
        assert fd.check_algebra_action()
        fdd = kuhn_dual(fd)
        # double dual agrees with the original block by block
        for t in range(f.algebra.dim):
            assert np.array_equal(f.act_dense(t).a, fdd.act_dense(t).a)
    f, g = bm("S^2", 2, 2), bm("G^2", 2, 2)
    assert len(hom_space(f, g)) == len(hom_space(kuhn_dual(g), kuhn_dual(f)))


def test_dual_of_symmetric_is_divided():
    sd = bm("dual(S^2)", 3, 2)
    g = bm("G^2", 3, 2)
    assert sd.dim == g.dim
    assert len(hom_space(sd, g)) == 1


def test_twist_module_agrees_with_twist_recipe():
    direct = bm("twist(S^2, 1)", 2, 2)
    lifted = twist_module(bm("S^2", 2, 2))
    assert direct.dim == lifted.dim
    assert sorted(direct.weights) == sorted(lifted.weights)
    assert lifted.check_algebra_action()
    assert len(hom_space(direct, lifted)) >= 1


def test_twist_multiplies_weights_by_p():
    f = bm("S^2", 3, 2)
    tf = twist_module(f)
    assert sorted(tf.weights) == sorted(tuple(3 * c for c in w) for w in f.weights)


def test_frobenius_twist_hom_rigidity():
    fr = bm("frob(1)", 2, 2)
    assert len(hom_space(fr, fr)) == 1
    assert len(hom_space(fr, bm("S^2", 2, 2))) == 1  # x -> x^p
    assert len(hom_space(bm("G^2", 2, 2), fr)) == 1


def test_evaluate_dims():
    f = bm("S^2", 2, 3)
    assert evaluate(f, 2).dim == divided_power_dim(2, 2)
    assert evaluate(f, 1).dim == 1
    g = bm("T^2", 3, 2)
    assert evaluate(g, 2).dim == 4


def test_parametrization_dims_and_adjunction():
    for v in (1, 2):
        sub = parametrize_sub(bm("S^2", 2, 2), v)
        assert sub.dim == divided_power_dim(2 * v, 2)
        assert sub.check_algebra_action()
        sup = parametrize_sup(bm("G^2", 2, 2), v)
        assert sup.dim == divided_power_dim(2 * v, 2)
        assert sup.check_algebra_action()
    f, g = bm("S^2", 2, 2), bm("G^2", 2, 2)
    assert len(hom_space(parametrize_sub(f, 2), g)) == len(
        hom_space(f, parametrize_sup(g, 2))
    )


def test_composition_dims():
    # S^2 o G^2 evaluated on k^2: S^2 of a 3-dimensional space
    c = bm("compose(S^2, G^2)", 2, 2)
    assert c.dim == divided_power_dim(3, 2)
    assert c.check_algebra_action()


def test_submodule_generated_spans_orbit():
    g = bm("G^2", 2, 2)
    ones = np.ones(g.dim, dtype=np.uint8)
    span = submodule_generated(g, [ones])
    assert span.cols == g.dim  # the orbit of the polarization vector is everything
    zero = np.zeros(g.dim, dtype=np.uint8)
    assert submodule_generated(g, [zero]).cols == 0


def test_tensor_function_blocks():
    f = tensor(bm("S^1", 2, 2), bm("G^1", 2, 2))
    assert f.dim == 4
    assert f.check_weights()
    assert f.check_algebra_action()


def test_guard_refuses_oversized_builds():
    with pytest.raises(GuardError):
        build_module(ex.parse("param_sub(S^2, 4)"), 2, 4, guard_dim=10)

"""Characteristic-2 coresolutions, the twist adjoint, and formality certificates."""

from math import comb

import pytest

from spflab import expr as ex
from spflab import formality as fm
from spflab.complexes import Complex
from spflab.coresolution import homology_module, symmetrization_map
from spflab.functors import hom_space

from conftest import bm


def _handmade_coresolution(p=2, n=2):
    s, t = bm("S^2", p, n), bm("T^2", p, n)
    beta = hom_space(s, t)[0]
    gamma = hom_space(t, s)[0]
    cx = Complex({0: s, 1: t, 2: s}, {0: beta.matrix, 1: gamma.matrix}, p)
    cx.check()
    return cx


# ---------------------------------------------------------------------------
# the standard characteristic-2 differential graded coresolution


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("w", [1, 2, 3])
def test_standard_coresolution_char2_homology(d, w):
    c = fm.standard_coresolution_char2(d, w)
    profile = c.homology_profile()
    assert profile[0] == comb(w + d - 1, d)
    assert all(profile[i] == 0 for i in range(1, 2 * d + 1))
    assert c.degree_zero_homology_dim() == comb(w + d - 1, d)


def test_standard_coresolution_rejects_odd_characteristic():
    with pytest.raises(ValueError):
        fm.standard_coresolution_char2(2, 2, p=3)


@pytest.mark.parametrize("d,w", [(1, 2), (2, 2), (2, 3), (3, 2)])
def test_derivation_is_a_derivation(d, w):
    c = fm.standard_coresolution_char2(d, w)
    assert c.leibniz_check(25, seed=20240801)


# ---------------------------------------------------------------------------
# even-concentration verification of untwisted formality (p = 2, r = 1)


def test_formality_verify_identity():
    rep = fm.formality_verify_p2r1(ex.parse("I"), n=2)
    assert rep["verdict"] == "even-concentration"
    assert [e["hom_dim"] for e in rep["degrees"]] == [2, 0, 2]
    assert all(e["match"] for e in rep["degrees"])
    assert rep["total_match"]
    assert rep["total_dim"] == rep["twisted_dim"] == 4


def test_formality_verify_rejects_odd_characteristic():
    with pytest.raises(ValueError):
        fm.formality_verify_p2r1(ex.parse("I"), n=2, p=3)


def test_formality_verify_needs_enough_variables():
    with pytest.raises(ValueError):
        fm.formality_verify_p2r1(ex.parse("S^2"), n=2)


# ---------------------------------------------------------------------------
# the twist adjoint K


def test_twist_adjoint_of_standard_coresolution():
    data = fm.twist_adjoint(ex.parse("frob(1)"), _handmade_coresolution(), n=2)
    k = data.complex
    dims = {i: k.homology_dim(i) for i in range(3)}
    # H^i K = V (x) Ext^i(I^(1), I^(1)): two copies of the identity functor
    assert dims == {0: 2, 1: 0, 2: 2}
    for i in range(3):
        mod = k.module(i)
        if mod is not None and mod.dim:
            assert mod.check_algebra_action()


@pytest.mark.parametrize(
    "recipe,z,d,n",
    [("I", 2, 2, 2), ("frob(1)", 2, 1, 2)],
)
def test_twist_adjoint_dim_identity(recipe, z, d, n):
    lhs, rhs = fm.twist_adjoint_dim_identity(ex.parse(recipe), z, d, n, 2)
    assert lhs == rhs


# ---------------------------------------------------------------------------
# formality certificates


def test_even_concentration_certificate():
    s = bm("S^2", 2, 2)
    cx = Complex({0: s, 2: s}, {}, 2)
    cert = fm.formality_check_even(cx)
    assert cert is not None
    assert cert.strategy == "even-concentration"
    assert cert.graded_dims == {0: 3, 2: 3}
    odd = Complex({1: s}, {}, 2)
    assert fm.formality_check_even(odd) is None


def test_untwist_certificate_zero_differential():
    s, g = bm("S^2", 2, 2), bm("G^2", 2, 2)
    cx = Complex({-1: s, 0: g}, {}, 2)
    cert = fm.untwist_formality_certificate(cx)
    assert cert is not None
    assert cert.strategy == "untwist-splitting"
    assert cert.graded_dims == {-1: 3, 0: 3}
    data = cert.to_json()
    assert data["strategy"] == "untwist-splitting"


def test_untwist_certificate_quasi_iso_to_homology():
    cx = _handmade_coresolution()
    cert = fm.untwist_formality_certificate(cx)
    assert cert is not None
    assert cert.graded_dims == {0: 2}
    # certificate dims agree with the homology of the input complex
    for k, dim in cert.graded_dims.items():
        assert homology_module(cx, k).dim == dim


def test_untwist_certificate_fails_on_nonformal_complex():
    s, g = bm("S^2", 2, 2), bm("G^2", 2, 2)
    alpha = symmetrization_map(2, 2)
    cx = Complex({-1: s, 0: g}, {-1: alpha.matrix}, 2)
    assert fm.untwist_formality_certificate(cx) is None

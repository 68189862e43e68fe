"""Exact F_p linear algebra: eliminations, kernels, solves, both backends."""

import numpy as np
import pytest

from spflab import linalg
from spflab.linalg import FpMatrix, quotient_basis
from spflab.linalg import _pykernels

PRIMES = (2, 3, 5, 7)


def _rand(rng, rows, cols, p):
    return FpMatrix(rng.integers(0, p, size=(rows, cols), dtype=np.int64), p)


def test_backend_is_reported():
    assert linalg.BACKEND in ("cython", "python")


def test_rref_known_matrix():
    m = FpMatrix(np.array([[1, 1, 0], [1, 1, 1], [0, 0, 1]]), 2)
    r, pivots = m.rref()
    assert pivots == [0, 2]
    assert np.array_equal(r.a, np.array([[1, 1, 0], [0, 0, 1], [0, 0, 0]]))


@pytest.mark.parametrize("p", PRIMES)
def test_rref_properties_random(p):
    rng = np.random.default_rng(100 + p)
    for _ in range(20):
        rows, cols = rng.integers(1, 12, size=2)
        m = _rand(rng, rows, cols, p)
        r, pivots = m.rref()
        # pivot columns are strictly increasing unit columns
        assert pivots == sorted(pivots)
        for k, c in enumerate(pivots):
            col = r.a[:, c]
            assert col[k] == 1 and np.count_nonzero(col) == 1
        # row space is preserved: each original row solves against R's rows
        assert r.rank() == m.rank() == len(pivots)


@pytest.mark.parametrize("p", PRIMES)
def test_kernel_and_rank_nullity(p):
    rng = np.random.default_rng(200 + p)
    for _ in range(20):
        rows, cols = rng.integers(1, 12, size=2)
        m = _rand(rng, rows, cols, p)
        k = m.kernel_basis()
        assert (m @ k).is_zero()
        assert m.rank() + k.cols == m.cols
        assert k.rank() == k.cols  # kernel basis is independent


@pytest.mark.parametrize("p", PRIMES)
def test_solve_consistent_and_inconsistent(p):
    rng = np.random.default_rng(300 + p)
    for _ in range(20):
        rows, cols = int(rng.integers(2, 10)), int(rng.integers(1, 8))
        m = _rand(rng, rows, cols, p)
        x = rng.integers(0, p, size=cols)
        b = (m.a @ x) % p
        sol = m.solve(b)
        assert sol is not None
        assert np.array_equal((m.a @ sol.astype(np.int64)) % p, b)
    # a vector outside the image has no solution
    m = FpMatrix(np.array([[1, 0], [0, 0]]), p)
    assert m.solve(np.array([0, 1])) is None


@pytest.mark.parametrize("p", PRIMES)
def test_quotient_basis_complements_subspace(p):
    rng = np.random.default_rng(400 + p)
    for _ in range(10):
        dim = int(rng.integers(2, 10))
        sub = _rand(rng, dim, int(rng.integers(0, dim)), p).image_basis()
        q = quotient_basis(sub, dim)
        assert sub.cols + q.cols == dim
        assert sub.hstack(q).rank() == dim


@pytest.mark.parametrize("p", PRIMES)
def test_matmul_matches_integer_arithmetic(p):
    rng = np.random.default_rng(500 + p)
    for _ in range(10):
        a = _rand(rng, 13, 17, p)
        b = _rand(rng, 17, 9, p)
        want = (a.a.astype(object) @ b.a.astype(object)) % p
        got = (a @ b).a
        assert np.array_equal(got, want.astype(np.int64))


def test_matmul_large_inner_dimension_stays_exact():
    # wide product at the largest prime: the accumulation bound must hold
    rng = np.random.default_rng(7)
    p = 7
    a = FpMatrix(np.full((3, 5000), p - 1, dtype=np.int64), p)
    b = FpMatrix(np.full((5000, 3), p - 1, dtype=np.int64), p)
    want = (a.a.astype(object) @ b.a.astype(object)) % p
    assert np.array_equal((a @ b).a, want.astype(np.int64))
    a = _rand(rng, 4, 3000, p)
    b = _rand(rng, 3000, 4, p)
    want = (a.a.astype(object) @ b.a.astype(object)) % p
    assert np.array_equal((a @ b).a, want.astype(np.int64))


def test_pure_python_kernels_agree_with_selected_backend():
    rng = np.random.default_rng(42)
    for _ in range(15):
        rows, cols = rng.integers(1, 30, size=2)
        m = rng.integers(0, 2, size=(rows, cols), dtype=np.uint8)
        fast_r, fast_piv = FpMatrix(m.astype(np.int64), 2).rref()
        words = _pykernels.pack_gf2(m.copy())
        py_piv = _pykernels.rref_gf2_packed(words, int(cols))
        py_r = _pykernels.unpack_gf2(words, int(cols))
        assert fast_piv == list(py_piv)
        assert np.array_equal(fast_r.a.astype(np.uint8), py_r)


def test_pure_python_gfp_elimination_agrees():
    rng = np.random.default_rng(43)
    for p in (3, 5, 7):
        for _ in range(10):
            rows, cols = rng.integers(1, 15, size=2)
            m = rng.integers(0, p, size=(rows, cols), dtype=np.uint8)
            fast_r, fast_piv = FpMatrix(m.astype(np.int64), p).rref()
            work = m.copy()
            py_piv = _pykernels.rref_gfp(work, p)
            assert fast_piv == list(py_piv)
            assert np.array_equal(fast_r.a.astype(np.uint8), work)


@pytest.mark.parametrize("p", PRIMES)
def test_image_basis_spans_columns(p):
    rng = np.random.default_rng(600 + p)
    m = _rand(rng, 8, 12, p)
    im = m.image_basis()
    assert im.rank() == im.cols == m.rank()
    for c in range(m.cols):
        assert im.solve(m.a[:, c]) is not None


def test_hstack_vstack_transpose():
    a = FpMatrix(np.array([[1, 2], [0, 1]]), 3)
    b = FpMatrix(np.array([[2], [2]]), 3)
    assert a.hstack(b).shape == (2, 3)
    assert a.vstack(a).shape == (4, 2)
    assert np.array_equal(a.transpose().a, a.a.T)
    assert np.array_equal(FpMatrix.identity(3, 5).a, np.eye(3, dtype=np.int64))

"""FpMatrix: exact dense matrices over F_p, plus weight-tagged block matrices.

All operations are pure; matrices are treated as immutable after
construction.  Elimination is deterministic (first-nonzero pivoting), so
ranks, kernels and quotient representatives are reproducible bit-for-bit.
"""

from __future__ import annotations

import numpy as np

from . import _kernels, _pykernels

SUPPORTED_PRIMES = (2, 3, 5, 7, 11, 13)


def _as_residues(data, p):
    a = np.asarray(data, dtype=np.int64) % p
    return a.astype(np.uint8)


class FpMatrix:
    """A rows x cols matrix with entries in F_p."""

    __slots__ = ("a", "p")

    def __init__(self, data, p):
        if p not in SUPPORTED_PRIMES:
            raise ValueError(f"unsupported prime {p}")
        a = _as_residues(data, p)
        if a.ndim != 2:
            raise ValueError("FpMatrix needs a 2-d array")
        self.a = np.ascontiguousarray(a)
        self.p = p

    @classmethod
    def zeros(cls, rows, cols, p):
        return cls(np.zeros((rows, cols), dtype=np.uint8), p)

    @classmethod
    def identity(cls, n, p):
        return cls(np.eye(n, dtype=np.uint8), p)

    @classmethod
    def column(cls, vec, p):
        return cls(np.asarray(vec, dtype=np.int64).reshape(-1, 1), p)

    @property
    def rows(self):
        return self.a.shape[0]

    @property
    def cols(self):
        return self.a.shape[1]

    @property
    def shape(self):
        return self.a.shape

    def __eq__(self, other):
        return (
            isinstance(other, FpMatrix)
            and self.p == other.p
            and self.shape == other.shape
            and np.array_equal(self.a, other.a)
        )

    def __hash__(self):
        return hash((self.p, self.shape, self.a.tobytes()))

    def __repr__(self):
        return f"FpMatrix(p={self.p}, {self.rows}x{self.cols})"

    def is_zero(self):
        return not self.a.any()

    def __add__(self, other):
        self._check(other)
        return FpMatrix((self.a.astype(np.int64) + other.a) % self.p, self.p)

    def __sub__(self, other):
        self._check(other)
        return FpMatrix((self.a.astype(np.int64) - other.a) % self.p, self.p)

    def __neg__(self):
        return FpMatrix((-self.a.astype(np.int64)) % self.p, self.p)

    def scale(self, c):
        return FpMatrix((self.a.astype(np.int64) * (c % self.p)) % self.p, self.p)

    def __matmul__(self, other):
        self._check(other, product=True)
        # float64 matmul hits BLAS; exact because every accumulated product
        # is below 2^53: entries are < p <= 13 and inner dimensions stay far
        # under 2^46
        if self.cols > (1 << 46) // (self.p * self.p):
            prod = (self.a.astype(object) @ other.a.astype(object)) % self.p
            return FpMatrix(prod.astype(np.int64), self.p)
        prod = self.a.astype(np.float64) @ other.a.astype(np.float64)
        return FpMatrix((prod % self.p).astype(np.int64), self.p)

    def transpose(self):
        return FpMatrix(self.a.T, self.p)

    def hstack(self, other):
        self._check_p(other)
        return FpMatrix(np.hstack([self.a, other.a]), self.p)

    def vstack(self, other):
        self._check_p(other)
        return FpMatrix(np.vstack([self.a, other.a]), self.p)

    def col_slice(self, j0, j1):
        return FpMatrix(self.a[:, j0:j1], self.p)

    def row_slice(self, i0, i1):
        return FpMatrix(self.a[i0:i1, :], self.p)

    def rref(self):
        """Reduced row echelon form and pivot columns."""
        r, piv = rref(self.a, self.p)
        return FpMatrix(r, self.p), piv

    def rank(self):
        return len(self.rref()[1])

    def kernel_basis(self):
        """Columns spanning the null space {x : self @ x = 0}."""
        p, n = self.p, self.cols
        r, piv = self.rref()
        free = [j for j in range(n) if j not in piv]
        k = FpMatrix.zeros(n, len(free), p)
        ka = k.a
        for t, j in enumerate(free):
            ka[j, t] = 1
            for row, pc in enumerate(piv):
                ka[pc, t] = (-int(r.a[row, j])) % p
        return k

    def solve_matrix(self, b):
        """X with self @ X = b, or None when inconsistent."""
        self._check_p(b)
        if b.rows != self.rows:
            raise ValueError("dimension mismatch in solve")
        n = self.cols
        aug, piv = self.hstack(b).rref()
        if any(c >= n for c in piv):
            return None
        x = FpMatrix.zeros(n, b.cols, self.p)
        for row, pc in enumerate(piv):
            x.a[pc, :] = aug.a[row, n:]
        return x

    def solve(self, vec):
        """x with self @ x = vec (a 1-d residue vector), or None."""
        x = self.solve_matrix(FpMatrix.column(vec, self.p))
        return None if x is None else x.a[:, 0].copy()

    def image_basis(self):
        """Columns forming a basis of the column space (a subset of columns)."""
        _, piv = rref(self.a, self.p)
        return FpMatrix(self.a[:, piv], self.p)

    def _check(self, other, product=False):
        self._check_p(other)
        if product:
            if self.cols != other.rows:
                raise ValueError("dimension mismatch in product")
        elif self.shape != other.shape:
            raise ValueError("shape mismatch")

    def _check_p(self, other):
        if not isinstance(other, FpMatrix) or other.p != self.p:
            raise ValueError("mixed characteristics")


def rref(a, p):
    """RREF of a uint8 residue matrix; returns (array copy, pivot columns)."""
    a = np.ascontiguousarray(np.asarray(a, dtype=np.uint8))
    m, n = a.shape
    if m == 0 or n == 0:
        return a.copy(), []
    if p == 2:
        words = _pykernels.pack_gf2(a)
        piv = _kernels.rref_gf2_packed(words, n)
        return _pykernels.unpack_gf2(words, n), piv
    out = a.copy()
    piv = _kernels.rref_gfp(out, p)
    return out, piv


def rank(m: FpMatrix) -> int:
    return m.rank()


def kernel_basis(m: FpMatrix) -> FpMatrix:
    return m.kernel_basis()


def solve(m: FpMatrix, b):
    return m.solve(b)


def quotient_basis(sub: FpMatrix, ambient_dim: int) -> FpMatrix:
    """Standard-basis representatives completing col(sub) to F_p^n.

    Deterministic: picks e_j for every j that is not a pivot row of the
    column space, in increasing order.
    """
    if sub.rows != ambient_dim:
        raise ValueError("subspace does not live in the stated ambient space")
    _, piv = rref(sub.a.T, sub.p)
    free = [j for j in range(ambient_dim) if j not in piv]
    reps = FpMatrix.zeros(ambient_dim, len(free), sub.p)
    for t, j in enumerate(free):
        reps.a[j, t] = 1
    return reps


def intersect_with_kernel(basis: FpMatrix, equations: FpMatrix) -> FpMatrix:
    """Restrict a solution-space basis (columns) by new equation rows."""
    if basis.cols == 0:
        return basis
    reduced = equations @ basis
    if reduced.is_zero():
        return basis
    return basis @ reduced.kernel_basis()


class BlockMatrix:
    """Matrix split into blocks labeled by weight tags; absent blocks are zero.

    Equivariant maps are block-diagonal in the weight grading, which is the
    case this class is tuned for: `rank` then dispatches per tag instead of
    assembling the dense matrix.
    """

    def __init__(self, row_blocks, col_blocks, p):
        # row_blocks / col_blocks: ordered list of (tag, dim)
        self.row_blocks = list(row_blocks)
        self.col_blocks = list(col_blocks)
        self.p = p
        self.blocks = {}

    def set_block(self, rtag, ctag, mat: FpMatrix):
        rdim = dict(self.row_blocks)[rtag]
        cdim = dict(self.col_blocks)[ctag]
        if mat.shape != (rdim, cdim):
            raise ValueError("block shape inconsistent with labels")
        self.blocks[(rtag, ctag)] = mat

    def get_block(self, rtag, ctag):
        blk = self.blocks.get((rtag, ctag))
        if blk is None:
            rdim = dict(self.row_blocks)[rtag]
            cdim = dict(self.col_blocks)[ctag]
            blk = FpMatrix.zeros(rdim, cdim, self.p)
        return blk

    def is_block_diagonal(self):
        return all(rt == ct for rt, ct in self.blocks)

    def rank(self):
        if self.is_block_diagonal():
            return sum(b.rank() for b in self.blocks.values())
        return self.to_dense().rank()

    def to_dense(self):
        roff, off = {}, 0
        for tag, dim in self.row_blocks:
            roff[tag] = off
            off += dim
        total_r = off
        coff, off = {}, 0
        for tag, dim in self.col_blocks:
            coff[tag] = off
            off += dim
        dense = FpMatrix.zeros(total_r, off, self.p)
        for (rt, ct), blk in self.blocks.items():
            dense.a[roff[rt] : roff[rt] + blk.rows, coff[ct] : coff[ct] + blk.cols] = blk.a
        return dense

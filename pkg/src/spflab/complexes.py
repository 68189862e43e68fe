"""Cochain complexes of F_p spaces (optionally with module structure).

A `Complex` stores terms by integer cohomological degree.  A term is either
a `FunctorModule` (when the equivariant structure matters, e.g. for solving
for cochain maps in the module category) or a plain dimension.  Differentials
`d[k]: term[k] -> term[k+1]` are dense FpMatrix maps.
"""

from __future__ import annotations

import numpy as np

from .functors import hom_space
from .linalg import FpMatrix
from .linalg.dense import intersect_with_kernel


def _dim(term):
    return term if isinstance(term, int) else term.dim


class Complex:
    def __init__(self, terms, diffs, p):
        self.terms = dict(terms)
        self.diffs = dict(diffs)
        self.p = p
        for k, d in self.diffs.items():
            if d.shape != (self.dim(k + 1), self.dim(k)):
                raise ValueError(f"differential at degree {k} has wrong shape")

    @property
    def degrees(self):
        return sorted(self.terms)

    def term(self, k):
        return self.terms.get(k, 0)

    def dim(self, k):
        return _dim(self.terms.get(k, 0))

    def module(self, k):
        t = self.terms.get(k)
        return None if isinstance(t, int) else t

    def diff(self, k):
        d = self.diffs.get(k)
        if d is None:
            d = FpMatrix.zeros(self.dim(k + 1), self.dim(k), self.p)
        return d

    def check(self):
        """d o d = 0 at every degree."""
        for k in self.degrees:
            prod = self.diff(k) @ self.diff(k - 1)
            if not prod.is_zero():
                raise AssertionError(f"d^2 != 0 at degree {k - 1}")
        return True

    def cycles(self, k):
        """Column basis of ker(d_k)."""
        return self.diff(k).kernel_basis()

    def boundaries(self, k):
        """Column basis of im(d_{k-1}) inside term k."""
        return self.diff(k - 1).image_basis()

    def homology_dim(self, k):
        zk = self.dim(k) - self.diff(k).rank()
        bk = self.diff(k - 1).rank()
        return zk - bk

    def homology_dims(self, degrees=None):
        if degrees is None:
            degrees = self.degrees
        return {k: self.homology_dim(k) for k in degrees}

    def is_exact_at(self, k):
        return self.homology_dim(k) == 0

    def shift(self, s):
        """C[s]: term k becomes term k - s; differentials pick up (-1)^s."""
        sign = 1 if s % 2 == 0 else -1
        terms = {k - s: t for k, t in self.terms.items()}
        diffs = {k - s: d.scale(sign) for k, d in self.diffs.items()}
        return Complex(terms, diffs, self.p)


def single_module_complex(module, degree=0):
    return Complex({degree: module}, {}, module.p)


def mapping_cone(f, src: Complex, dst: Complex):
    """Cone of a cochain map f = {k: FpMatrix src^k -> dst^k}.

    cone^k = src^{k+1} (+) dst^k with d(a, b) = (-d_src a, f a + d_dst b).
    """
    p = src.p
    degrees = sorted(
        set(k - 1 for k in src.terms) | set(dst.terms)
    )
    terms = {}
    diffs = {}
    for k in degrees:
        terms[k] = src.dim(k + 1) + dst.dim(k)
    for k in degrees:
        rows = src.dim(k + 2) + dst.dim(k + 1)
        cols = src.dim(k + 1) + dst.dim(k)
        if rows == 0 or cols == 0:
            continue
        m = FpMatrix.zeros(rows, cols, p)
        a = src.diff(k + 1)
        m.a[: src.dim(k + 2), : src.dim(k + 1)] = (-a.a.astype(np.int64)) % p
        fk = f.get(k + 1)
        if fk is not None:
            m.a[src.dim(k + 2) :, : src.dim(k + 1)] = fk.a
        m.a[src.dim(k + 2) :, src.dim(k + 1) :] = dst.diff(k).a
        diffs[k] = m
    cone = Complex(terms, diffs, p)
    cone.check()
    return cone


def is_quasi_iso(f, src: Complex, dst: Complex):
    cone = mapping_cone(f, src, dst)
    return all(cone.is_exact_at(k) for k in cone.degrees)


def cochain_map_space(src: Complex, dst: Complex):
    """Basis of degree-0 cochain maps src -> dst in the module category.

    Terms of both complexes must be FunctorModules over a common algebra.
    Returns a list of maps, each a {degree: FpMatrix} dict.
    """
    p = src.p
    degrees = sorted(set(src.terms) & set(dst.terms))
    per_degree = {}
    offsets = {}
    total = 0
    for k in degrees:
        ms, md = src.module(k), dst.module(k)
        if ms is None or md is None:
            raise ValueError("cochain_map_space needs module terms")
        basis = hom_space(ms, md)
        if basis:
            per_degree[k] = basis
            offsets[k] = total
            total += len(basis)
    if total == 0:
        return []
    sol = FpMatrix.identity(total, p)
    # commuting equations: f^{k+1} d_src^k - d_dst^k f^k = 0
    for k in sorted(set(src.terms)):
        rows = dst.dim(k + 1)
        cols = src.dim(k)
        if rows == 0 or cols == 0:
            continue
        eqs = np.zeros((rows * cols, total), dtype=np.int64)
        for j, h in enumerate(per_degree.get(k + 1, [])):
            contrib = h.matrix @ src.diff(k)
            eqs[:, offsets[k + 1] + j] += contrib.a.astype(np.int64).ravel()
        for j, h in enumerate(per_degree.get(k, [])):
            contrib = dst.diff(k) @ h.matrix
            eqs[:, offsets[k] + j] -= contrib.a.astype(np.int64).ravel()
        if eqs.any():
            sol = intersect_with_kernel(sol, FpMatrix(eqs % p, p))
            if sol.cols == 0:
                return []
    out = []
    for c in range(sol.cols):
        fmap = {}
        for k, basis in per_degree.items():
            mat = FpMatrix.zeros(dst.dim(k), src.dim(k), p)
            for j, h in enumerate(basis):
                coeff = int(sol.a[offsets[k] + j, c])
                if coeff:
                    mat = mat + h.matrix.scale(coeff)
            if not mat.is_zero():
                fmap[k] = mat
        out.append(fmap)
    return out


def null_homotopy(f, src: Complex, dst: Complex):
    """Equivariant s = {k: src^k -> dst^{k-1}} with d s + s d = f, or None."""
    p = src.p
    per_degree = {}
    offsets = {}
    total = 0
    for k in sorted(src.terms):
        ms, md = src.module(k), dst.module(k - 1)
        if ms is None or md is None or ms.dim == 0 or md.dim == 0:
            continue
        basis = hom_space(ms, md)
        if basis:
            per_degree[k] = basis
            offsets[k] = total
            total += len(basis)
    eq_rows = []
    rhs_rows = []
    for k in sorted(set(src.terms) | set(dst.terms)):
        rows = dst.dim(k)
        cols = src.dim(k)
        if rows == 0 or cols == 0:
            continue
        eqs = np.zeros((rows * cols, total), dtype=np.int64)
        for j, h in enumerate(per_degree.get(k, [])):
            contrib = dst.diff(k - 1) @ h.matrix
            eqs[:, offsets[k] + j] += contrib.a.astype(np.int64).ravel()
        for j, h in enumerate(per_degree.get(k + 1, [])):
            contrib = h.matrix @ src.diff(k)
            eqs[:, offsets[k + 1] + j] += contrib.a.astype(np.int64).ravel()
        fk = f.get(k)
        target = fk.a.astype(np.int64).ravel() if fk is not None else np.zeros(rows * cols, dtype=np.int64)
        eq_rows.append(eqs)
        rhs_rows.append(target)
    if not eq_rows:
        return {} if all(m.is_zero() for m in f.values()) else None
    big = FpMatrix(np.vstack(eq_rows) % p, p)
    rhs = FpMatrix(np.concatenate(rhs_rows).reshape(-1, 1) % p, p)
    x = big.solve_matrix(rhs)
    if x is None:
        return None
    s = {}
    for k, basis in per_degree.items():
        mat = FpMatrix.zeros(dst.dim(k - 1), src.dim(k), p)
        for j, h in enumerate(basis):
            coeff = int(x.a[offsets[k] + j, 0])
            if coeff:
                mat = mat + h.matrix.scale(coeff)
        s[k] = mat
    return s

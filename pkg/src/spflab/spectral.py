"""Bicomplexes, total complexes, and spectral sequences with explicit pages.

Conventions: a bicomplex K has terms K[i][j] with a horizontal differential
h: K_i^j -> K_i^{j+1} and a vertical differential v: K_i^j -> K_{i+1}^j,
commuting squares.  The total complex places K_i^j in degree i + j with
d = h + (-1)^j v.

Spectral sequences are computed from the filtration of the total complex by
the first index (F^s = blocks with i >= s), with explicit subquotient bases,
so pages carry genuine differential matrices and morphisms of spectral
sequences can be evaluated and checked.
"""

from __future__ import annotations

import numpy as np

from .complexes import Complex
from .linalg import FpMatrix


class Bicomplex:
    def __init__(self, terms, hdiffs, vdiffs, p):
        # terms: {i: {j: FunctorModule | int}}
        self.terms = {i: dict(row) for i, row in terms.items()}
        self.hdiffs = {i: dict(row) for i, row in hdiffs.items()}
        self.vdiffs = {i: dict(row) for i, row in vdiffs.items()}
        self.p = p

    def positions(self):
        return [(i, j) for i in sorted(self.terms) for j in sorted(self.terms[i])]

    def dim(self, i, j):
        t = self.terms.get(i, {}).get(j, 0)
        return t if isinstance(t, int) else t.dim

    def module(self, i, j):
        t = self.terms.get(i, {}).get(j)
        return None if isinstance(t, int) else t

    def h(self, i, j):
        d = self.hdiffs.get(i, {}).get(j)
        if d is None:
            d = FpMatrix.zeros(self.dim(i, j + 1), self.dim(i, j), self.p)
        return d

    def v(self, i, j):
        d = self.vdiffs.get(i, {}).get(j)
        if d is None:
            d = FpMatrix.zeros(self.dim(i + 1, j), self.dim(i, j), self.p)
        return d

    def check(self):
        for i, j in self.positions():
            if not (self.h(i, j + 1) @ self.h(i, j)).is_zero():
                raise AssertionError(f"h^2 != 0 at ({i},{j})")
            if not (self.v(i + 1, j) @ self.v(i, j)).is_zero():
                raise AssertionError(f"v^2 != 0 at ({i},{j})")
            sq = self.v(i, j + 1) @ self.h(i, j) - self.h(i + 1, j) @ self.v(i, j)
            if not sq.is_zero():
                raise AssertionError(f"square does not commute at ({i},{j})")
        return True

    def transpose(self):
        """Swap the two directions (for the other filtration)."""
        terms, hd, vd = {}, {}, {}
        for i, row in self.terms.items():
            for j, t in row.items():
                terms.setdefault(j, {})[i] = t
        for i, row in self.vdiffs.items():
            for j, d in row.items():
                hd.setdefault(j, {})[i] = d
        for i, row in self.hdiffs.items():
            for j, d in row.items():
                vd.setdefault(j, {})[i] = d
        return Bicomplex(terms, hd, vd, self.p)

    def total(self):
        """The signed total complex, with recorded block offsets."""
        p = self.p
        blocks = {}
        for i, j in self.positions():
            if self.dim(i, j):
                blocks.setdefault(i + j, []).append((i, j))
        for n in blocks:
            blocks[n].sort()
        offsets = {}
        dims = {}
        for n, pos in blocks.items():
            off = 0
            for ij in pos:
                offsets[ij] = off
                off += self.dim(*ij)
            dims[n] = off
        diffs = {}
        for n in sorted(blocks):
            if n + 1 not in blocks:
                continue
            d = FpMatrix.zeros(dims[n + 1], dims[n], p)
            for i, j in blocks[n]:
                off = offsets[(i, j)]
                w = self.dim(i, j)
                if (i, j + 1) in offsets:
                    blk = self.h(i, j)
                    r = offsets[(i, j + 1)]
                    d.a[r : r + blk.rows, off : off + w] = blk.a
                if (i + 1, j) in offsets:
                    blk = self.v(i, j)
                    sign = 1 if j % 2 == 0 else -1
                    r = offsets[(i + 1, j)]
                    d.a[r : r + blk.rows, off : off + w] = (
                        sign * blk.a.astype(np.int64)
                    ) % p
            diffs[n] = d
        total = Complex(dims, diffs, p)
        total.block_offsets = offsets
        total.block_dims = {ij: self.dim(*ij) for ij in offsets}
        return total


def total_homology(bic: Bicomplex):
    tot = bic.total()
    tot.check()
    return tot.homology_dims()


class SpectralSequence:
    """Pages E_r (r >= 1) of the first-index filtration of a bicomplex.

    For each page r and bidegree (s, t), stores the dimension, the
    differential d_r: (s,t) -> (s+r, t-r+1), and representative bases inside
    the total complex so that induced morphisms can be computed.
    """

    def __init__(self, bic: Bicomplex, r_max):
        self.bic = bic
        self.p = bic.p
        self.total = bic.total()
        self.total.check()
        self.r_max = r_max
        self._z = {}  # (r, s, t) -> basis of Z_r inside Tot^{s+t}
        self._reps = {}  # (r, s, t) -> (denominator, representatives)
        self.entries = {}  # r -> {(s, t): dim}
        self.diffs = {}  # r -> {(s, t): FpMatrix}
        self._s_values = sorted({ij[0] for ij in getattr(self.total, "block_offsets", {})})
        self._compute()

    # -- filtration plumbing -------------------------------------------------

    def _filtration_basis(self, s, n):
        """Standard-basis columns of F^s Tot^n (blocks with first index >= s)."""
        offs = self.total.block_offsets
        cols = []
        for (i, j), off in sorted(offs.items()):
            if i + j == n and i >= s:
                cols.extend(range(off, off + self.total.block_dims[(i, j)]))
        m = FpMatrix.zeros(self.total.dim(n), len(cols), self.p)
        for c, idx in enumerate(cols):
            m.a[idx, c] = 1
        return m

    def _project_below(self, s, n):
        """Projection of Tot^n onto the blocks with first index < s."""
        offs = self.total.block_offsets
        rows = []
        for (i, j), off in sorted(offs.items()):
            if i + j == n and i < s:
                rows.extend(range(off, off + self.total.block_dims[(i, j)]))
        m = FpMatrix.zeros(len(rows), self.total.dim(n), self.p)
        for r, idx in enumerate(rows):
            m.a[r, idx] = 1
        return m

    def _z_basis(self, r, s, n):
        """Basis of Z_r^s = F^s Tot^n with d x in F^{s+r}."""
        key = (r, s, n)
        z = self._z.get(key)
        if z is None:
            f = self._filtration_basis(s, n)
            if f.cols == 0:
                z = f
            else:
                eqs = self._project_below(s + r, n + 1) @ self.total.diff(n) @ f
                if eqs.rows == 0 or eqs.is_zero():
                    z = f
                else:
                    z = f @ eqs.kernel_basis()
            self._z[key] = z
        return z

    def _page_space(self, r, s, t):
        """(denominator basis, representative columns) for E_r^{s,t}."""
        key = (r, s, t)
        got = self._reps.get(key)
        if got is not None:
            return got
        n = s + t
        num = self._z_basis(r, s, n)
        den_parts = []
        z_up = self._z_basis(r - 1, s + 1, n)
        if z_up.cols:
            den_parts.append(z_up)
        z_in = self._z_basis(r - 1, s - r + 1, n - 1)
        if z_in.cols:
            img = self.total.diff(n - 1) @ z_in
            if not img.is_zero():
                den_parts.append(img)
        if den_parts:
            den = den_parts[0]
            for part in den_parts[1:]:
                den = den.hstack(part)
            den = den.image_basis()
        else:
            den = FpMatrix.zeros(self.total.dim(n), 0, self.p)
        if num.cols == 0:
            reps = num
        else:
            combined, piv = den.hstack(num).rref()
            rep_cols = [c - den.cols for c in piv if c >= den.cols]
            reps = FpMatrix(num.a[:, rep_cols], self.p)
        self._reps[key] = (den, reps)
        return den, reps

    def express(self, r, s, t, vectors: FpMatrix):
        """Coordinates of total-complex vectors in E_r^{s,t}."""
        den, reps = self._page_space(r, s, t)
        basis = den.hstack(reps)
        sol = basis.solve_matrix(vectors)
        if sol is None:
            raise AssertionError(f"vector not in Z_r + boundaries at E_{r}^{{{s},{t}}}")
        return FpMatrix(sol.a[den.cols :, :], self.p)

    # -- pages ---------------------------------------------------------------

    def _compute(self):
        positions = sorted(self.total.block_offsets)
        for r in range(1, self.r_max + 1):
            page = {}
            dmaps = {}
            for s, j in positions:
                t = j  # bidegree (s, t) with t the second index
                den, reps = self._page_space(r, s, t)
                dim = reps.cols
                if dim:
                    page[(s, t)] = dim
            for (s, t), dim in page.items():
                if (s + r, t - r + 1) not in page:
                    dmaps[(s, t)] = FpMatrix.zeros(0, dim, self.p)
                    continue
                _, reps = self._page_space(r, s, t)
                image = self.total.diff(s + t) @ reps
                dmaps[(s, t)] = self.express(r, s + r, t - r + 1, image)
            self.entries[r] = page
            self.diffs[r] = dmaps

    def page(self, r):
        return dict(self.entries.get(r, {}))

    def differentials(self, r):
        return dict(self.diffs.get(r, {}))

    def is_collapsed_from(self, r0):
        for r in range(r0, self.r_max + 1):
            for mat in self.diffs.get(r, {}).values():
                if not mat.is_zero():
                    return False
        return True

    def einf_antidiagonal_sums(self):
        page = self.entries.get(self.r_max, {})
        out = {}
        for (s, t), dim in page.items():
            out[s + t] = out.get(s + t, 0) + dim
        return out

    def to_json(self, r):
        page = self.entries.get(r, {})
        nonzero = [
            {"i": s, "j": t}
            for (s, t), mat in self.diffs.get(r, {}).items()
            if not mat.is_zero()
        ]
        return {
            "page": r,
            "entries": [
                {"i": s, "j": t, "dim": dim} for (s, t), dim in sorted(page.items())
            ],
            "differentials_nonzero": nonzero,
        }


def ss_morphism(src: SpectralSequence, dst: SpectralSequence, chain_map, r):
    """Induced maps on page r of a filtration-preserving total chain map.

    chain_map: {n: FpMatrix Tot_src^n -> Tot_dst^n}.  Returns
    {(s,t): FpMatrix} between page-r entries.
    """
    out = {}
    for (s, t), dim in src.entries.get(r, {}).items():
        _, reps = src._page_space(r, s, t)
        n = s + t
        f = chain_map.get(n)
        if f is None:
            continue
        mapped = f @ reps
        if (s, t) in dst.entries.get(r, {}):
            out[(s, t)] = dst.express(r, s, t, mapped)
        else:
            if not mapped.is_zero():
                # target entry is zero: the image must die in the subquotient
                dst.express(r, s, t, mapped)
            out[(s, t)] = FpMatrix.zeros(0, dim, src.p)
    return out


class CollapseCertificate:
    def __init__(self, page, verified_through, details):
        self.page = page
        self.verified_through = verified_through
        self.details = details

    def to_json(self):
        return {
            "collapse_page": self.page,
            "verified_through": self.verified_through,
            "details": self.details,
        }


def check_collapse_lemma(src: SpectralSequence, dst: SpectralSequence, chain_map):
    """If the induced page-2 map is injective and the target is collapsed,
    verify that the source collapses too.  Returns (verdict, certificate-or-reason)."""
    phi2 = ss_morphism(src, dst, chain_map, 2)
    for (s, t), dim in src.entries.get(2, {}).items():
        mat = phi2.get((s, t))
        if mat is None or mat.rank() < dim:
            return False, f"morphism not injective at E_2^{{{s},{t}}}"
    if not dst.is_collapsed_from(2):
        return False, "target spectral sequence does not collapse at page 2"
    if not src.is_collapsed_from(2):
        return False, "internal inconsistency: source fails to collapse"
    cert = CollapseCertificate(
        2, src.r_max, "injective at page 2 into a collapsed sequence"
    )
    return True, cert


# ---------------------------------------------------------------------------
# hyper-Ext


def _express_in_map_basis(basis_maps, mat: FpMatrix, p):
    """Coordinates of an FpMatrix in a basis of hom-space maps."""
    if not basis_maps:
        if mat is not None and not mat.is_zero():
            raise AssertionError("map does not lie in the (empty) hom space")
        return np.zeros(0, dtype=np.uint8)
    stacked = FpMatrix(
        np.stack([h.matrix.a.astype(np.uint8).ravel() for h in basis_maps], axis=1), p
    )
    sol = stacked.solve(mat.a.ravel())
    if sol is None:
        raise AssertionError("map does not lie in the hom space")
    return sol


def hom_bicomplex(c: Complex, j_complex: Complex):
    """The bicomplex T^{i,j} = Hom(C_j, J^i) with C_j = C^{-j}.

    First (filtration) index = J-degree i; vertical differential is
    postcomposition with d_J, horizontal is precomposition with d_C.
    Returns (Bicomplex, bases) where bases[(i, j)] is the hom-space basis.
    """
    from .functors import hom_space

    p = c.p
    c_indices = sorted(-k for k in c.terms)
    j_indices = sorted(j_complex.terms)
    bases = {}
    terms = {}
    for i in j_indices:
        terms[i] = {}
        for j in c_indices:
            src = c.module(-j)
            dst = j_complex.module(i)
            basis = hom_space(src, dst)
            bases[(i, j)] = basis
            terms[i][j] = len(basis)
    hd = {}
    vd = {}
    for i in j_indices:
        for j in c_indices:
            basis = bases[(i, j)]
            # horizontal: precompose with d_C : C_{j+1} -> C_j
            if (i, j + 1) in bases:
                tgt = bases[(i, j + 1)]
                mat = FpMatrix.zeros(len(tgt), len(basis), p)
                dc = c.diff(-(j + 1))
                for col, h in enumerate(basis):
                    coords = _express_in_map_basis(tgt, h.matrix @ dc, p)
                    mat.a[:, col] = coords
                hd.setdefault(i, {})[j] = mat
            # vertical: postcompose with d_J : J^i -> J^{i+1}
            if (i + 1, j) in bases:
                tgt = bases[(i + 1, j)]
                mat = FpMatrix.zeros(len(tgt), len(basis), p)
                dj = j_complex.diff(i)
                for col, h in enumerate(basis):
                    coords = _express_in_map_basis(tgt, dj @ h.matrix, p)
                    mat.a[:, col] = coords
                vd.setdefault(i, {})[j] = mat
    bic = Bicomplex(terms, hd, vd, p)
    bic.check()
    return bic, bases


def hyper_ext_ss(c: Complex, d_module, i_max, r_max=None, coresolution=None):
    """The hyper-Ext spectral sequence of (C^., D).

    D is coresolved to length i_max + 1; the returned SpectralSequence has
    E_2^{ij} = H^i Hom(H_j(C_.), J^.) converging to H^{i+j} of the total Hom
    complex.  `coresolution` may supply a precomputed (complex, augmentation).
    """
    from .coresolution import coresolve

    if coresolution is None:
        j_complex, _aug = coresolve(d_module, i_max + 1)
    else:
        j_complex, _aug = coresolution
    bic, bases = hom_bicomplex(c, j_complex)
    if r_max is None:
        spread = len(bic.terms) + max(len(r) for r in bic.terms.values()) + 1
        r_max = max(3, spread)
    ss = SpectralSequence(bic, r_max)
    ss.hom_bases = bases
    ss.j_complex = j_complex
    return ss


def lift_through_coresolution(src: Complex, src_aug, dst: Complex, dst_aug, f0):
    """Chain map phi: src -> dst with phi^0 o src_aug = dst_aug o f0.

    src must be an exact-in-positive-degrees coresolution-shaped complex and
    dst a complex of injectives; the lift is found degree by degree by
    solving in the equivariant hom spaces.  Raises if some stage is
    unsolvable.
    """
    from .functors import hom_space

    p = src.p
    phi = {}
    prev = None
    for i in sorted(src.terms):
        basis = hom_space(src.module(i), dst.module(i))
        if not basis:
            phi[i] = FpMatrix.zeros(dst.dim(i), src.dim(i), p)
            prev = i
            continue
        stacked = FpMatrix(
            np.stack([h.matrix.a.astype(np.uint8).ravel() for h in basis], axis=1), p
        )
        if prev is None:
            # phi^0 src_aug = dst_aug f0
            lhs_cols = []
            for h in basis:
                lhs_cols.append((h.matrix @ src_aug).a.astype(np.uint8).ravel())
            lhs = FpMatrix(np.stack(lhs_cols, axis=1), p)
            rhs = (dst_aug @ f0).a.ravel()
        else:
            lhs_cols = []
            for h in basis:
                lhs_cols.append((h.matrix @ src.diff(prev)).a.astype(np.uint8).ravel())
            lhs = FpMatrix(np.stack(lhs_cols, axis=1), p)
            rhs = (dst.diff(prev) @ phi[prev]).a.ravel()
        sol = lhs.solve(rhs)
        if sol is None:
            raise AssertionError(f"no chain-map lift at coresolution degree {i}")
        mat = FpMatrix.zeros(dst.dim(i), src.dim(i), p)
        for coeff, h in zip(sol, basis):
            if coeff:
                mat = mat + h.matrix.scale(int(coeff))
        phi[i] = mat
        prev = i
    return phi


def induced_total_map(src_ss: SpectralSequence, dst_ss: SpectralSequence, block_maps):
    """Assemble per-entry maps into a map of total complexes.

    block_maps[(i, j)]: FpMatrix from src entry coordinates to dst entry
    coordinates (in the hom-space bases).  Returns {n: FpMatrix}.
    """
    p = src_ss.p
    out = {}
    src_tot, dst_tot = src_ss.total, dst_ss.total
    degrees = sorted({i + j for (i, j) in src_tot.block_offsets})
    for n in degrees:
        mat = FpMatrix.zeros(dst_tot.dim(n), src_tot.dim(n), p)
        for (i, j), off in src_tot.block_offsets.items():
            if i + j != n:
                continue
            blk = block_maps.get((i, j))
            if blk is None:
                continue
            doff = dst_tot.block_offsets.get((i, j))
            if doff is None:
                if not blk.is_zero():
                    raise AssertionError(f"map hits a missing block at {(i, j)}")
                continue
            mat.a[doff : doff + blk.rows, off : off + blk.cols] = blk.a
        out[n] = mat
    return out

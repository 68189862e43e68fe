"""Projective resolutions, injective coresolutions, and Ext tables.

The workhorse is the resolution of a module by direct sums of the weight
projectives S(n,d) e_lam: Hom(S e_lam, M) is the weight space M_lam, so the
induced Hom complexes stay small (one weight block per summand) even when
the ambient algebra is large.  Injective coresolutions are obtained from
projective resolutions of the Kuhn dual, term by term, using that the dual
of a weight projective is injective.
"""

from __future__ import annotations

from math import factorial

import numpy as np

from .combinat import multisets
from .complexes import Complex
from .functors import (
    FunctorModule,
    ModuleMap,
    hom_space,
    kuhn_dual,
    make_divided,
    make_symmetric,
    parametrize_sub,
    submodule_generated,
    weight_projective,
)
from .linalg import FpMatrix


def direct_sum(modules, name=None):
    """Direct sum of modules over a common algebra (block-diagonal action)."""
    if not modules:
        raise ValueError("empty direct sum")
    alg = modules[0].algebra
    p = modules[0].p
    labels, weights = [], []
    for k, mod in enumerate(modules):
        if mod.algebra is not alg:
            raise ValueError("summands must share the algebra object")
        labels.extend((k, lab) for lab in mod.labels)
        weights.extend(mod.weights)

    holder = {}

    def block_fn(t):
        big = holder["m"]
        lam = alg.left_weights[t]
        mu = alg.right_weights[t]
        rows = big.weight_dim(lam)
        cols = big.weight_dim(mu)
        blk = FpMatrix.zeros(rows, cols, p)
        r = c = 0
        for mod in modules:
            sub = mod.act_block(t)
            blk.a[r : r + sub.rows, c : c + sub.cols] = sub.a
            r += sub.rows
            c += sub.cols
        return blk

    mod = FunctorModule(
        alg,
        labels,
        weights,
        block_fn,
        name=name or "(+)".join(m.name for m in modules),
    )
    holder["m"] = mod
    # summand offsets in the direct-sum coordinates
    mod.summands = list(modules)
    offs, off = [], 0
    for m in modules:
        offs.append(off)
        off += m.dim
    mod.summand_offsets = offs
    return mod


def _in_span(span: FpMatrix, vec):
    if span.cols == 0:
        return not np.asarray(vec).any()
    return span.solve(vec) is not None


def _extend_span(module, span, vec):
    gen_span = submodule_generated(module, [vec])
    if span.cols == 0:
        return gen_span
    return span.hstack(gen_span).image_basis()


def module_generators(module, candidates=None, weight_order=None):
    """Greedy weight-homogeneous generating set.

    candidates: list of (weight, dense vector); defaults to the standard
    basis vectors, visited by descending weight.
    """
    p = module.p
    if candidates is None:
        order = weight_order or sorted(module.by_weight, reverse=True)
        candidates = []
        for w in order:
            for i in module.indices_of_weight(w):
                v = np.zeros(module.dim, dtype=np.uint8)
                v[i] = 1
                candidates.append((w, v))
    span = FpMatrix.zeros(module.dim, 0, p)
    gens = []
    for w, v in candidates:
        if _in_span(span, v):
            continue
        gens.append((tuple(w), np.asarray(v, dtype=np.uint8) % p))
        span = _extend_span(module, span, v)
        if span.cols == module.dim:
            break
    return gens


class Resolution:
    """A projective resolution ... -> P_1 -> P_0 -> M -> 0.

    levels[i] holds the direct-sum module P_i, its summand weights, and the
    generator images (columns of P_{i-1}, or of M for i = 0) that define the
    map out of each summand.
    """

    def __init__(self, target, levels, maps, augmentation):
        self.target = target
        self.levels = levels  # list of dicts: module, weights, gens
        self.maps = maps  # maps[i]: P_i -> P_{i-1} for i >= 1
        self.augmentation = augmentation  # P_0 -> M

    def __len__(self):
        return len(self.levels)

    def module(self, i):
        return self.levels[i]["module"]

    def summand_weights(self, i):
        return self.levels[i]["weights"]

    def check(self):
        """Chain conditions and exactness, verified by ranks."""
        eps = self.augmentation
        if eps.rank() != self.target.dim:
            raise AssertionError("augmentation is not surjective")
        if self.maps:
            if not (eps @ self.maps[1]).is_zero():
                raise AssertionError("augmentation o d_1 != 0")
            if self.maps[1].rank() != eps.kernel_basis().cols:
                raise AssertionError("not exact at P_0")
        for i in range(2, len(self.maps) + 1):
            if not (self.maps[i - 1] @ self.maps[i]).is_zero():
                raise AssertionError(f"d_{i-1} o d_{i} != 0")
            if self.maps[i].rank() != self.maps[i - 1].kernel_basis().cols:
                raise AssertionError(f"not exact at P_{i-1}")
        return True


def _cover_by_projectives(module, gens):
    """P = (+) S e_{w(g)} with the map sending each summand onto gen g."""
    alg = module.algebra
    p = module.p
    projs = [weight_projective(alg, w) for w, _ in gens]
    P = direct_sum(projs) if projs else None
    if P is None:
        raise ValueError("cannot cover the zero module")
    cover = FpMatrix.zeros(module.dim, P.dim, p)
    col = 0
    for (w, g), proj in zip(gens, projs):
        for b in proj.labels:  # algebra basis indices with right weight w
            cover.a[:, col] = module.apply(b, g)
            col += 1
    return P, cover


def _homogeneous_kernel(src, dst, mat):
    """Kernel of a weight-preserving map, as (weight, vector) candidates."""
    out = []
    for w in sorted(src.by_weight, reverse=True):
        cols = src.indices_of_weight(w)
        rows = dst.indices_of_weight(w)
        if rows:
            blk = FpMatrix(mat.a[np.ix_(rows, cols)], src.p)
        else:
            blk = FpMatrix.zeros(0, len(cols), src.p)
        ker = blk.kernel_basis()
        for c in range(ker.cols):
            v = np.zeros(src.dim, dtype=np.uint8)
            v[cols] = ker.a[:, c]
            out.append((w, v))
    return out


def projective_resolve(module, length, weight_order=None):
    """Resolution by weight projectives out to P_length."""
    gens = module_generators(module, weight_order=weight_order)
    P0, eps = _cover_by_projectives(module, gens)
    levels = [{"module": P0, "weights": [w for w, _ in gens], "gens": gens}]
    maps = {}
    prev, prev_map = P0, eps
    prev_dst = module
    for i in range(1, length + 1):
        candidates = _homogeneous_kernel(prev, prev_dst, prev_map)
        gens = module_generators(prev, candidates=candidates)
        if not gens:
            break
        Pi, d = _cover_by_projectives(prev, gens)
        levels.append({"module": Pi, "weights": [w for w, _ in gens], "gens": gens})
        maps[i] = d
        prev_dst, prev_map, prev = prev, d, Pi
    return Resolution(module, levels, maps, eps)


def hom_complex(resolution, g):
    """Hom(P_., G) as a cochain complex in degrees 0..len-1.

    Hom(S e_lam, G) = G_lam, so term i is the direct sum of the weight
    spaces of G at the summand weights of P_i; the differential applies the
    generator vectors through G's action, one weight block per entry.
    """
    p = g.p
    dims = {}
    offsets = {}
    for i in range(len(resolution)):
        ws = resolution.summand_weights(i)
        offs, off = [], 0
        for w in ws:
            offs.append(off)
            off += g.weight_dim(w)
        offsets[i] = offs
        dims[i] = off
    diffs = {}
    for i in range(1, len(resolution)):
        d = FpMatrix.zeros(dims[i], dims[i - 1], p)
        prev = resolution.module(i - 1)
        ws_prev = resolution.summand_weights(i - 1)
        for s, (mu, v) in enumerate(resolution.levels[i]["gens"]):
            rows = slice(offsets[i][s], offsets[i][s] + g.weight_dim(mu))
            for k, lam in enumerate(ws_prev):
                off_k = prev.summand_offsets[k]
                proj = prev.summands[k]
                blk = np.zeros((g.weight_dim(mu), g.weight_dim(lam)), dtype=np.int64)
                for pos, b in enumerate(proj.labels):
                    coeff = int(v[off_k + pos])
                    if coeff:
                        blk += coeff * g.act_block(b).a.astype(np.int64)
                cols = slice(offsets[i - 1][k], offsets[i - 1][k] + g.weight_dim(lam))
                d.a[rows, cols] = (blk % p).astype(np.uint8)
        diffs[i - 1] = d
    return Complex(dims, diffs, p)


def ext_dims(f, g, i_max, weight_order=None):
    """dim Ext^i(F, G) for 0 <= i <= i_max via a weight-projective resolution."""
    res = projective_resolve(f, i_max + 1, weight_order=weight_order)
    hc = hom_complex(res, g)
    return [hc.homology_dim(i) for i in range(i_max + 1)]


class ExtTable:
    def __init__(self, f, g, i_max, dims):
        self.f = f
        self.g = g
        self.i_max = i_max
        self.dims = list(dims)

    def to_json(self):
        alg = self.f.algebra
        return {
            "p": alg.p,
            "n": alg.n,
            "d": alg.d,
            "F": self.f.name,
            "G": self.g.name,
            "i_max": self.i_max,
            "dims": self.dims,
        }


def ext_table(f, g, i_max, weight_order=None):
    return ExtTable(f, g, i_max, ext_dims(f, g, i_max, weight_order=weight_order))


# ---------------------------------------------------------------------------
# injective side


def coresolve(module, length, weight_order=None):
    """Injective coresolution 0 -> M -> J^0 -> J^1 -> ... via Kuhn duality.

    Terms are duals of weight projectives (injective summands of the
    parametrized symmetric power).  Returns (complex, augmentation) where the
    augmentation M -> J^0 is injective and the augmented complex is exact.
    """
    res = projective_resolve(kuhn_dual(module), length, weight_order=weight_order)
    terms = {}
    diffs = {}
    for i in range(len(res)):
        terms[i] = kuhn_dual(res.module(i))
    for i in range(1, len(res)):
        diffs[i - 1] = res.maps[i].transpose()
    cx = Complex(terms, diffs, module.p)
    augmentation = res.augmentation.transpose()
    return cx, augmentation


def embed_in_injective(module, v=None):
    """The canonical embedding F -> F^#(V) copies of S^d_V (V = k^v).

    The rows are a basis of Hom(F, S^d_V); the pairing with F^#(V) makes the
    stacked map injective.
    """
    alg = module.algebra
    v = alg.n if v is None else v
    sdv = parametrize_sub(make_symmetric(alg), v)
    homs = hom_space(module, sdv)
    copies = len(homs)
    j = direct_sum([sdv] * copies) if copies else None
    if j is None:
        raise ValueError("module has no maps to the parametrized symmetric power")
    mat = FpMatrix.zeros(j.dim, module.dim, module.p)
    for k, h in enumerate(homs):
        mat.a[k * sdv.dim : (k + 1) * sdv.dim, :] = h.matrix.a
    if mat.rank() != module.dim:
        raise AssertionError("canonical map into injectives failed to embed")
    return j, ModuleMap(module, j, mat)


def symmetrization_map(p, n):
    """alpha: S^p -> Gamma^p, diagonal with entries prod_i c_i! in F_p."""
    from .functors import get_algebra

    alg = get_algebra(p, n, p)
    s = make_symmetric(alg)
    g = make_divided(alg)
    mat = FpMatrix.zeros(g.dim, s.dim, p)
    for i, c in enumerate(s.labels):
        j = g.labels.index(c)
        coeff = 1
        for m in c:
            coeff = (coeff * factorial(m)) % p
        mat.a[j, i] = coeff
    return ModuleMap(s, g, mat)


def coresolve_complex(cx: Complex, length, weight_order=None):
    """Injective coresolution of a bounded complex of modules.

    Returns (K, u) with K a first-quadrant-style complex of complexes
    realized as: K.rows[j] = list of injective terms in coresolution degree
    0..length at complex degree j.  Concretely we produce a bicomplex
    (dicts of terms and of horizontal/vertical differentials) such that the
    total complex is quasi-isomorphic to cx via the augmentation u.

    Construction: embed degreewise with E(C^j) = J^0 from `coresolve`, then
    set K_0^j = E(C^j) (+) E(C^{j+1}) with u(x) = (e_j x, e_{j+1} d x) and
    horizontal differential (a, b) |-> (b, 0); iterate on the cokernels.
    """
    from .spectral import Bicomplex

    p = cx.p
    degrees = sorted(cx.terms)
    # degreewise injective embeddings
    embeds = {}
    for j in degrees:
        mod = cx.module(j)
        sub, aug = coresolve(mod, 0, weight_order=weight_order)
        embeds[j] = (sub.module(0), aug)

    terms = {}
    hdiffs = {}
    vmaps = {}
    aug_maps = {}
    # row 0
    row_modules = {}
    for j in degrees:
        parts = [embeds[j][0]]
        mats = [embeds[j][1]]
        if j + 1 in embeds:
            parts.append(embeds[j + 1][0])
            mats.append(embeds[j + 1][1] @ cx.diff(j))
        mod = direct_sum(parts)
        stacked = FpMatrix.zeros(mod.dim, cx.dim(j), p)
        r = 0
        for m in mats:
            stacked.a[r : r + m.rows, :] = m.a
            r += m.rows
        row_modules[j] = mod
        aug_maps[j] = stacked
    for j in degrees:
        if j + 1 not in row_modules:
            continue
        src = row_modules[j]
        dst = row_modules[j + 1]
        d = FpMatrix.zeros(dst.dim, src.dim, p)
        # (a, b) |-> (b, 0): the E(C^{j+1}) part of row j maps identically
        # onto the E(C^{j+1}) part of row j+1
        e_next_dim = embeds[j + 1][0].dim
        off_src = embeds[j][0].dim
        d.a[:e_next_dim, off_src : off_src + e_next_dim] = np.eye(
            e_next_dim, dtype=np.uint8
        )
        hdiffs[j] = d
    terms[0] = row_modules
    hrows = {0: hdiffs}

    # iterate on cokernels
    prev_row = row_modules
    prev_h = hdiffs
    prev_incl = aug_maps  # map whose cokernel we coresolve next
    for i in range(1, length + 1):
        new_row, new_h, vmap = _next_coresolution_row(
            cx, prev_row, prev_h, prev_incl, p, weight_order
        )
        if new_row is None:
            break
        vmaps[i - 1] = vmap
        terms[i] = new_row
        hrows[i] = new_h
        prev_row, prev_h = new_row, new_h
        prev_incl = {j: vmap[j] for j in new_row}
    bic = Bicomplex(terms, hrows, vmaps, p)
    return bic, aug_maps


def _next_coresolution_row(cx, row, hdiff, incl, p, weight_order):
    """Embed the cokernels of `incl` (equipped with induced differentials)."""
    from .linalg.dense import quotient_basis

    degrees = sorted(row)
    quots = {}
    for j in degrees:
        mod = row[j]
        image = incl[j].image_basis()
        reps = quotient_basis(image, mod.dim)
        if reps.cols == 0:
            quots[j] = None
            continue
        quots[j] = (mod, image, reps)
    if all(q is None for q in quots.values()):
        return None, None, None
    # cokernel as an abstract module: basis = representative vectors; action
    # and differentials are computed by reducing modulo the image.
    cok_modules = {}
    cok_diffs = {}
    for j in degrees:
        if quots[j] is None:
            continue
        cok_modules[j] = _quotient_module(row[j], quots[j][1], quots[j][2])
    for j in degrees:
        if quots[j] is None or quots.get(j + 1) is None:
            continue
        src_reps = quots[j][2]
        mapped = hdiff[j] @ src_reps if j in hdiff else None
        if mapped is None:
            continue
        cok_diffs[j] = _reduce_mod_image(mapped, quots[j + 1][1], quots[j + 1][2], p)
    sub = Complex(
        {j: m for j, m in cok_modules.items()},
        cok_diffs,
        p,
    )
    new_row = {}
    new_h = {}
    vmap = {}
    embeds = {}
    for j in sorted(cok_modules):
        subres, aug = coresolve(cok_modules[j], 0, weight_order=weight_order)
        embeds[j] = (subres.module(0), aug)
    for j in sorted(cok_modules):
        parts = [embeds[j][0]]
        mats = [embeds[j][1]]
        if j + 1 in embeds:
            parts.append(embeds[j + 1][0])
            mats.append(embeds[j + 1][1] @ sub.diff(j))
        mod = direct_sum(parts)
        stacked = FpMatrix.zeros(mod.dim, cok_modules[j].dim, p)
        r = 0
        for m in mats:
            stacked.a[r : r + m.rows, :] = m.a
            r += m.rows
        new_row[j] = mod
        # vertical map: previous row -> quotient -> embedding
        proj = _projection_to_quotient(row[j], quots[j][1], quots[j][2], p)
        vmap[j] = stacked @ proj
    for j in sorted(cok_modules):
        if j + 1 not in new_row:
            continue
        d = FpMatrix.zeros(new_row[j + 1].dim, new_row[j].dim, p)
        e_next_dim = embeds[j + 1][0].dim
        off_src = embeds[j][0].dim
        d.a[:e_next_dim, off_src : off_src + e_next_dim] = np.eye(
            e_next_dim, dtype=np.uint8
        )
        new_h[j] = d
    return new_row, new_h, vmap


def subquotient_module(module, denominator, reps, name=None):
    """A subquotient of a module, with basis the given representative columns.

    `denominator` spans the subobject being killed; `reps` are
    weight-homogeneous vectors whose classes form a basis of the subquotient.
    The action applies the ambient module's action and re-expresses the
    result in [denominator | reps] coordinates.
    """
    p = module.p
    alg = module.algebra
    basis_cols = denominator.hstack(reps)
    r = reps.cols
    weights = []
    for c in range(r):
        support = np.flatnonzero(reps.a[:, c])
        ws = {module.weights[int(idx)] for idx in support}
        if len(ws) != 1:
            raise ValueError("subquotient representatives must be weight-homogeneous")
        weights.append(ws.pop())

    holder = {}

    def block_fn(t):
        big = holder["m"]
        lam = alg.left_weights[t]
        mu = alg.right_weights[t]
        rows = big.indices_of_weight(lam)
        cols = big.indices_of_weight(mu)
        blk = FpMatrix.zeros(len(rows), len(cols), p)
        for cpos, c in enumerate(cols):
            img = module.apply(t, reps.a[:, c])
            sol = basis_cols.solve(img)
            if sol is None:
                raise AssertionError("subquotient action left the span")
            for rpos, rr in enumerate(rows):
                blk.a[rpos, cpos] = sol[denominator.cols + rr]
        return blk

    mod = FunctorModule(
        alg,
        [("q", c) for c in range(r)],
        weights,
        block_fn,
        name=name or f"{module.name}-subquotient",
    )
    holder["m"] = mod
    return mod


def _quotient_module(module, image, reps):
    """The quotient of a module by a submodule, in representative coordinates."""
    return subquotient_module(module, image, reps, name=f"{module.name}/im")


def homology_module(cx: Complex, k, name=None):
    """H^k of a complex of modules, as a subquotient FunctorModule."""
    module = cx.module(k)
    if module is None:
        raise ValueError("homology_module needs module terms")
    p = module.p
    kernel = cx.diff(k).kernel_basis()
    image = cx.diff(k - 1).image_basis()
    combined, piv = image.hstack(kernel).rref()
    rep_cols = [c - image.cols for c in piv if c >= image.cols]
    reps = FpMatrix(kernel.a[:, rep_cols], p)
    return subquotient_module(
        module, image, reps, name=name or f"H^{k}({module.name})"
    )


def _reduce_mod_image(vectors: FpMatrix, image: FpMatrix, reps: FpMatrix, p):
    """Coordinates of vectors in the quotient basis given by reps."""
    basis_cols = image.hstack(reps)
    sol = basis_cols.solve_matrix(vectors)
    if sol is None:
        raise AssertionError("vector not in image + representatives span")
    return FpMatrix(sol.a[image.cols :, :], p)


def _projection_to_quotient(module, image, reps, p):
    ident = FpMatrix.identity(module.dim, p)
    return _reduce_mod_image(ident, image, reps, p)

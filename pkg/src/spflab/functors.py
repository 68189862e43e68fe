"""Degree-d polynomial functors realized as weight-graded S(n, d)-modules.

A `FunctorModule` is a finite-dimensional S(n, d)-module whose basis vectors
are torus weight vectors.  Every algebra basis element e_M sends the
right-weight(M) block to the left-weight(M) block, so actions are stored as
single blocks rather than full dense matrices.

Modules remember the expression (`recipe`) that built them, which makes
evaluation at another vector-space dimension a rebuild over S(w, d).
"""

from __future__ import annotations

import itertools
from collections import Counter

import numpy as np

from . import expr as ex
from .combinat import content, multisets, sorted_word, submultisets
from .linalg import FpMatrix
from .linalg.dense import intersect_with_kernel
from .schur import SchurAlgebra, act_on_word, col_weight, row_weight


class FunctorModule:
    """A weight-graded module over a Schur algebra.

    `block_fn(t)` returns the action of basis element e_t as the matrix from
    the right-weight(t) block to the left-weight(t) block, in the order given
    by `indices_of_weight`.
    """

    def __init__(self, algebra, labels, weights, block_fn, recipe=None, name=None):
        self.algebra = algebra
        self.labels = list(labels)
        self.weights = [tuple(w) for w in weights]
        if len(self.weights) != len(self.labels):
            raise ValueError("one weight per basis label")
        self.dim = len(self.labels)
        self.by_weight = {}
        for i, w in enumerate(self.weights):
            self.by_weight.setdefault(w, []).append(i)
        self._block_fn = block_fn
        self._blocks = {}
        self.recipe = recipe
        self.name = name or (str(recipe) if recipe is not None else "module")

    def __repr__(self):
        alg = self.algebra
        return f"FunctorModule({self.name}, p={alg.p}, n={alg.n}, d={alg.d}, dim={self.dim})"

    @property
    def p(self):
        return self.algebra.p

    def indices_of_weight(self, w):
        return self.by_weight.get(tuple(w), [])

    def weight_dim(self, w):
        return len(self.indices_of_weight(w))

    def act_block(self, t):
        """Action of e_t: right-weight(t) block -> left-weight(t) block."""
        blk = self._blocks.get(t)
        if blk is None:
            blk = self._block_fn(t)
            lam = self.algebra.left_weights[t]
            mu = self.algebra.right_weights[t]
            expected = (self.weight_dim(lam), self.weight_dim(mu))
            if blk.shape != expected:
                raise ValueError(
                    f"action block of e_{t} has shape {blk.shape}, expected {expected}"
                )
            self._blocks[t] = blk
        return blk

    def act_dense(self, t):
        """Full dim x dim action matrix of e_t."""
        m = FpMatrix.zeros(self.dim, self.dim, self.p)
        blk = self.act_block(t)
        rows = self.indices_of_weight(self.algebra.left_weights[t])
        cols = self.indices_of_weight(self.algebra.right_weights[t])
        for r, i in enumerate(rows):
            for c, j in enumerate(cols):
                m.a[i, j] = blk.a[r, c]
        return m

    def act_element_dense(self, coords):
        m = FpMatrix.zeros(self.dim, self.dim, self.p)
        for t, c in coords.items():
            if c % self.p:
                m = m + self.act_dense(t).scale(c)
        return m

    def apply(self, t, vec):
        """e_t applied to a dense coordinate vector."""
        cols = self.indices_of_weight(self.algebra.right_weights[t])
        rows = self.indices_of_weight(self.algebra.left_weights[t])
        if not cols or not rows:
            return np.zeros(self.dim, dtype=np.uint8)
        blk = self.act_block(t)
        sub = np.asarray(vec, dtype=np.int64)[cols]
        out = np.zeros(self.dim, dtype=np.int64)
        out[rows] = blk.a.astype(np.int64) @ sub
        return (out % self.p).astype(np.uint8)

    def check_weights(self):
        """Each weight idempotent must act as projection onto its block."""
        alg = self.algebra
        for lam in alg.by_left_weight:
            t = alg.weight_idempotent(lam)
            blk = self.act_block(t)
            k = self.weight_dim(lam)
            if blk != FpMatrix.identity(k, self.p):
                raise AssertionError(f"idempotent of weight {lam} is not a projection")
        return True

    def check_algebra_action(self, sample=None):
        """act(e_i) act(e_j) == act(e_i * e_j) on a sample of index pairs."""
        alg = self.algebra
        pairs = sample
        if pairs is None:
            pairs = [
                (i, j)
                for i in range(alg.dim)
                for j in alg.by_left_weight.get(alg.right_weights[i], [])
            ]
        for i, j in pairs:
            lhs = self.act_dense(i) @ self.act_dense(j)
            rhs = self.act_element_dense(alg.multiply_basis(i, j))
            if lhs != rhs:
                raise AssertionError(f"action not multiplicative at ({i}, {j})")
        return True


def _block_from_columns(module_ref, column_fn):
    """Adapt a per-basis-vector column function to a block function."""

    def block_fn(t):
        mod = module_ref()
        alg = mod.algebra
        rows = mod.indices_of_weight(alg.left_weights[t])
        cols = mod.indices_of_weight(alg.right_weights[t])
        pos = {i: r for r, i in enumerate(rows)}
        blk = FpMatrix.zeros(len(rows), len(cols), mod.p)
        for c, j in enumerate(cols):
            for i, coeff in column_fn(t, j).items():
                blk.a[pos[i], c] = coeff % mod.p
        return blk

    return block_fn


def _make_with_columns(algebra, labels, weights, column_fn, recipe, name):
    holder = {}
    mod = FunctorModule(
        algebra,
        labels,
        weights,
        _block_from_columns(lambda: holder["m"], column_fn),
        recipe=recipe,
        name=name,
    )
    holder["m"] = mod
    return mod


# ---------------------------------------------------------------------------
# atomic functors


def make_tensor_power(algebra):
    """The d-th tensor power: basis words in [n]^d, permutation-free action."""
    n, d = algebra.n, algebra.d
    words = list(itertools.product(range(n), repeat=d))
    index = {w: i for i, w in enumerate(words)}
    weights = [content(w, n) for w in words]

    def column(t, j):
        out = Counter()
        for u in act_on_word(algebra.basis[t], words[j]):
            out[index[u]] += 1
        return out

    return _make_with_columns(
        algebra, words, weights, column, ex.TensorPow(d), f"T^{d}"
    )


def make_divided(algebra):
    """Gamma^d: the orbit-sum (symmetric-invariant) subspace of the tensor power."""
    n, d = algebra.n, algebra.d
    labels = [content(w, n) for w in multisets(range(n), d)]
    index = {c: i for i, c in enumerate(labels)}

    def column(t, j):
        pairs = algebra.basis[t]
        mu = labels[j]
        if algebra.right_weights[t] != mu:
            return {}
        # coefficient on the orbit sum of left-weight content, read at the
        # sorted word of that content
        lam = algebra.left_weights[t]
        w0 = sorted_word(lam)
        count = 0
        for v in act_on_word(tuple((j_, i_) for i_, j_ in pairs), w0):
            if content(v, n) == mu:
                count += 1
        return {index[lam]: count}

    return _make_with_columns(algebra, labels, labels, column, ex.Div(d), f"G^{d}")


def make_symmetric(algebra):
    """S^d: the coinvariant quotient of the tensor power, basis of contents."""
    n, d = algebra.n, algebra.d
    labels = [content(w, n) for w in multisets(range(n), d)]
    index = {c: i for i, c in enumerate(labels)}

    def column(t, j):
        out = Counter()
        for u in act_on_word(algebra.basis[t], sorted_word(labels[j])):
            out[index[content(u, n)]] += 1
        return out

    return _make_with_columns(algebra, labels, labels, column, ex.Sym(d), f"S^{d}")


def make_identity(algebra):
    if algebra.d != 1:
        raise ValueError("the identity functor has degree 1")
    n = algebra.n
    weights = [tuple(1 if k == i else 0 for k in range(n)) for i in range(n)]

    def column(t, j):
        (i_, j_) = algebra.basis[t][0]
        return {i_: 1} if j_ == j else {}

    return _make_with_columns(algebra, list(range(n)), weights, column, ex.Ident(), "I")


def make_frobenius_twist(algebra, r):
    """I^(r): the span of p^r-th powers inside S^(p^r)."""
    p, n = algebra.p, algebra.n
    q = p**r
    if algebra.d != q:
        raise ValueError(f"I^({r}) has degree p^r = {q}, got d = {algebra.d}")
    weights = [tuple(q if k == i else 0 for k in range(n)) for i in range(n)]

    def column(t, j):
        pairs = algebra.basis[t]
        i_ = pairs[0][0]
        if all(pr == (i_, j) for pr in pairs):
            return {i_: 1}
        return {}

    return _make_with_columns(
        algebra, list(range(n)), weights, column, ex.Frob(r), f"I^({r})"
    )


def weight_projective(algebra, lam):
    """The projective module S(n,d) e_lam (left multiplication action)."""
    lam = tuple(lam)
    indices = algebra.by_right_weight.get(lam, [])
    if not indices:
        raise ValueError(f"{lam} is not a weight of S({algebra.n},{algebra.d})")
    pos = {b: c for c, b in enumerate(indices)}
    weights = [algebra.left_weights[b] for b in indices]

    def column(t, j):
        out = {}
        for b, coeff in algebra.multiply_basis(t, indices[j]).items():
            out[pos[b]] = coeff
        return out

    return _make_with_columns(
        algebra, indices, weights, column, None, f"P{lam}"
    )


# ---------------------------------------------------------------------------
# combinators


def kuhn_dual(module):
    """F^#: transpose the action through the algebra's transpose
    anti-automorphism.  Weights and basis order are preserved, so applying
    the dual twice gives back the original action matrices exactly."""
    alg = module.algebra

    def block_fn(t):
        return module.act_block(alg.transpose_index(t)).transpose()

    recipe = None
    if module.recipe is not None:
        if isinstance(module.recipe, ex.Dual):
            recipe = module.recipe.arg
        else:
            recipe = ex.Dual(module.recipe)
    return FunctorModule(
        alg,
        [("#", lab) for lab in module.labels],
        module.weights,
        block_fn,
        recipe=recipe,
        name=f"dual({module.name})",
    )


def _dense_block_adapter(mod_ref, dense_fn):
    """Wrap a full dim x dim action function into the block contract."""

    def block_fn(t):
        mod = mod_ref()
        alg = mod.algebra
        rows = mod.indices_of_weight(alg.left_weights[t])
        cols = mod.indices_of_weight(alg.right_weights[t])
        if not rows or not cols:
            return FpMatrix.zeros(len(rows), len(cols), mod.p)
        dense = dense_fn(t)
        return FpMatrix(dense.a[np.ix_(rows, cols)], mod.p)

    return block_fn


def _make_with_dense(algebra, labels, weights, dense_fn, recipe, name):
    holder = {}
    mod = FunctorModule(
        algebra,
        labels,
        weights,
        _dense_block_adapter(lambda: holder["m"], dense_fn),
        recipe=recipe,
        name=name,
    )
    holder["m"] = mod
    return mod


def tensor(f, g):
    """F (*) G: basis pairs, action by splitting the matrix-unit multiset.

    e_M acts as the sum, over ways of writing M as a disjoint union of a
    deg(F)-sub-multiset M1 and its complement M2, of act_F(M1) (x) act_G(M2).
    Assembled block by block: each split contributes the Kronecker product
    of one F-block and one G-block, scattered into the combined weight block.
    """
    if f.algebra.p != g.algebra.p or f.algebra.n != g.algebra.n:
        raise ValueError("tensor factors must share p and n")
    p, n = f.algebra.p, f.algebra.n
    alg = get_algebra(p, n, f.algebra.d + g.algebra.d)
    labels = [(a, b) for a in f.labels for b in g.labels]
    weights = [
        tuple(x + y for x, y in zip(wa, wb)) for wa in f.weights for wb in g.weights
    ]
    falg, galg = f.algebra, g.algebra
    holder = {}

    def pair_positions(big, wf, wg):
        """Positions, inside big's combined weight block, of (F-block x G-block)."""
        combined = tuple(x + y for x, y in zip(wf, wg))
        pos = {lab: r for r, lab in enumerate(
            big.labels[i] for i in big.indices_of_weight(combined)
        )}
        rows_f = f.indices_of_weight(wf)
        rows_g = g.indices_of_weight(wg)
        out = np.empty(len(rows_f) * len(rows_g), dtype=np.int64)
        k = 0
        for i1 in rows_f:
            for i2 in rows_g:
                out[k] = pos[(f.labels[i1], g.labels[i2])]
                k += 1
        return out

    def block_fn(t):
        big = holder["m"]
        lam = alg.left_weights[t]
        mu = alg.right_weights[t]
        blk = np.zeros((big.weight_dim(lam), big.weight_dim(mu)), dtype=np.int64)
        for m1 in submultisets(alg.basis[t], falg.d):
            i1 = falg.index[m1]
            rest = list(alg.basis[t])
            for pr in m1:
                rest.remove(pr)
            i2 = galg.index[tuple(sorted(rest))]
            af = f.act_block(i1)
            ag = g.act_block(i2)
            if af.a.size == 0 or ag.a.size == 0:
                continue
            contrib = np.kron(af.a.astype(np.int64), ag.a.astype(np.int64))
            rows = pair_positions(big, falg.left_weights[i1], galg.left_weights[i2])
            cols = pair_positions(big, falg.right_weights[i1], galg.right_weights[i2])
            blk[np.ix_(rows, cols)] += contrib
        return FpMatrix(blk % p, p)

    rf = f.recipe if f.recipe is not None else ex.Ident()
    rg = g.recipe if g.recipe is not None else ex.Ident()
    factors = (rf.factors if isinstance(rf, ex.Tensor) else (rf,)) + (
        rg.factors if isinstance(rg, ex.Tensor) else (rg,)
    )
    mod = FunctorModule(
        alg,
        labels,
        weights,
        block_fn,
        recipe=ex.Tensor(factors),
        name=f"({f.name} (*) {g.name})",
    )
    holder["m"] = mod
    return mod


def compose(f_recipe, g, guard_dim=None):
    """F o G for F given by a recipe and G a built module.

    The inner module G identifies e_M in Gamma^(de)(End k^n) with a sum of
    d-fold tensors of its action matrices; reading that sum in the orbit-sum
    basis of Gamma^d(End G(k^n)) reduces the composite action to the action
    of the outer functor rebuilt over S(dim G(k^n), d).
    """
    outer = build_module(f_recipe, g.algebra.p, g.dim, guard_dim=guard_dim)
    recipe = None
    if outer.recipe is not None and g.recipe is not None:
        if isinstance(g.recipe, ex.Frob):
            recipe = ex.Twist(outer.recipe, g.recipe.r)
        else:
            recipe = ex.Compose(outer.recipe, g.recipe)
    return compose_with_outer(outer, g, recipe=recipe)


def compose_with_outer(outer, g, recipe=None):
    """F o G for a prebuilt outer module over S(dim G(k^n), deg F)."""
    p, n = g.algebra.p, g.algebra.n
    m = g.dim
    if outer.algebra.n != m or outer.algebra.p != p:
        raise ValueError("outer module must live over S(dim G, deg F)")
    d, e = outer.algebra.d, g.algebra.d
    alg = get_algebra(p, n, d * e)

    g_weights = [np.array(w, dtype=np.int64) for w in g.weights]
    weights = []
    for w_outer in outer.weights:
        total = np.zeros(n, dtype=np.int64)
        for b, mult in enumerate(w_outer):
            if mult:
                total += mult * g_weights[b]
        weights.append(tuple(int(x) for x in total))

    def dense_fn(t):
        big = np.zeros((m**d,) * 2, dtype=np.int64)
        for split in _ordered_splits(alg.basis[t], d, e):
            mats = [g.act_dense(g.algebra.index[part]).a.astype(np.int64) for part in split]
            k = mats[0]
            for mat in mats[1:]:
                k = np.kron(k, mat)
            big += k
        big %= p
        coords = Counter()
        oalg = outer.algebra
        for u, v in zip(*np.nonzero(big)):
            word = tuple(zip(_digits(int(u), m, d), _digits(int(v), m, d)))
            if word == tuple(sorted(word)):
                coords[oalg.index[word]] = int(big[u, v])
        return outer.act_element_dense(coords)

    return _make_with_dense(
        alg,
        [("o", lab) for lab in outer.labels],
        weights,
        dense_fn,
        recipe,
        f"({outer.name} o {g.name})",
    )


def _ordered_splits(pairs, d, e):
    """Ordered d-tuples of size-e sub-multisets partitioning `pairs`."""
    if d == 0:
        yield ()
        return
    for first in submultisets(pairs, e):
        rest = list(pairs)
        for pr in first:
            rest.remove(pr)
        for tail in _ordered_splits(tuple(sorted(rest)), d - 1, e):
            yield (first,) + tail


def _digits(x, base, length):
    out = []
    for _ in range(length):
        out.append(x % base)
        x //= base
    return tuple(reversed(out))


def twist_functor(f, r, guard_dim=None):
    """F^(r) = F o I^(r)."""
    if f.recipe is None:
        raise ValueError("twisting needs a module with a recipe")
    p, n = f.algebra.p, f.algebra.n
    frob = make_frobenius_twist(get_algebra(p, n, p**r), r)
    return compose(f.recipe, frob, guard_dim=guard_dim)


def twist_module(f, r=1):
    """F^(r) for any module (no recipe needed).

    Since dim I^(r)(k^n) = n, the outer functor of F o I^(r) can be F
    itself: the twisted module reuses F's coordinates, and any equivariant
    map between modules stays equivariant (with the same matrix) after
    twisting.
    """
    p, n = f.algebra.p, f.algebra.n
    frob = make_frobenius_twist(get_algebra(p, n, p**r), r)
    recipe = None
    if f.recipe is not None:
        recipe = ex.Twist(f.recipe, r)
    return compose_with_outer(f, frob, recipe=recipe)


def parametrize_sub(f, v, guard_dim=None):
    """F_V = F(V (x) -) with V = k^v, as an S(n, d)-module.

    Basis: F rebuilt at dimension v*n with index (a, i) |-> a*n + i; e_M acts
    as the sum of the lifted multisets {((a_t, i_t), (a_t, j_t))} over all
    distinct diagonal lifts of M.
    """
    return _parametrize(f, v, sub=True, guard_dim=guard_dim)


def parametrize_sup(f, v, guard_dim=None):
    """F^V = F(Hom(V, -)) with V = k^v; index (i, a) |-> i*v + a."""
    return _parametrize(f, v, sub=False, guard_dim=guard_dim)


class _BigModuleAdapter:
    """Action-by-multiset view of a fully built ambient module."""

    def __init__(self, module):
        self.module = module
        self.labels = module.labels
        self.weights = module.weights

    def indices_of_weight(self, w):
        return self.module.indices_of_weight(w)

    def block_for(self, key):
        big = self.module
        tt = big.algebra.index[key]
        rows = big.indices_of_weight(big.algebra.left_weights[tt])
        cols = big.indices_of_weight(big.algebra.right_weights[tt])
        return rows, cols, big.act_block(tt).a.astype(np.int64)


class _BigSymAdapter:
    """S^a(k^m) acted on by matrix-unit multisets, without the ambient algebra.

    The basis (monomial contents) is polynomial in m, while the ambient Schur
    algebra S(m, a) is not; parametrized symmetric powers only ever apply
    lifted multisets, so the algebra is never needed.
    """

    def __init__(self, p, m, a):
        self.p = p
        self.m = m
        self.a = a
        self.labels = [content(w, m) for w in multisets(range(m), a)]
        self.index = {c: i for i, c in enumerate(self.labels)}
        self.weights = self.labels
        self.by_weight = {}
        for i, w in enumerate(self.weights):
            self.by_weight.setdefault(w, []).append(i)
        self._cache = {}

    def indices_of_weight(self, w):
        return self.by_weight.get(tuple(w), [])

    def block_for(self, key):
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        lam = row_weight(key, self.m)
        mu = col_weight(key, self.m)
        rows = self.indices_of_weight(lam)
        cols = self.indices_of_weight(mu)
        pos = {i: r for r, i in enumerate(rows)}
        blk = np.zeros((len(rows), len(cols)), dtype=np.int64)
        for c, j in enumerate(cols):
            for u in act_on_word(key, sorted_word(self.labels[j])):
                blk[pos[self.index[content(u, self.m)]], c] += 1
        out = (rows, cols, blk % self.p)
        self._cache[key] = out
        return out


def _parametrize(f, v, sub, guard_dim):
    if f.recipe is None:
        raise ValueError("parametrization needs a module with a recipe")
    p, n, d = f.algebra.p, f.algebra.n, f.algebra.d
    if isinstance(f.recipe, ex.Sym):
        big = _BigSymAdapter(p, v * n, f.recipe.k)
        if guard_dim is not None and len(big.labels) > guard_dim:
            raise GuardError(
                f"parametrized dimension {len(big.labels)} exceeds guard {guard_dim}"
            )
    else:
        big = _BigModuleAdapter(build_module(f.recipe, p, v * n, guard_dim=guard_dim))
    alg = get_algebra(p, n, d)

    if sub:
        def lift_pair(a, i, j):
            return (a * n + i, a * n + j)
    else:
        def lift_pair(a, i, j):
            return (i * v + a, j * v + a)

    def fold_weight(w_big):
        out = [0] * n
        for idx, mult in enumerate(w_big):
            if mult:
                i = (idx % n) if sub else (idx // v)
                out[i] += mult
        return tuple(out)

    weights = [fold_weight(w) for w in big.weights]
    holder = {}

    def lifted_indices(t):
        pairs = alg.basis[t]
        distinct = sorted(set(pairs))
        mults = [pairs.count(pr) for pr in distinct]
        seen = set()
        for labels in itertools.product(
            *(multisets(range(v), mult) for mult in mults)
        ):
            lifted = []
            for (i, j), lab in zip(distinct, labels):
                for a in lab:
                    lifted.append(lift_pair(a, i, j))
            key = tuple(sorted(lifted))
            if key not in seen:
                seen.add(key)
                yield key

    def block_fn(t):
        mod = holder["m"]
        lam = alg.left_weights[t]
        mu = alg.right_weights[t]
        rows = mod.indices_of_weight(lam)
        cols = mod.indices_of_weight(mu)
        pos_row = {i: r for r, i in enumerate(rows)}
        pos_col = {j: c for c, j in enumerate(cols)}
        blk = np.zeros((len(rows), len(cols)), dtype=np.int64)
        for key in lifted_indices(t):
            big_rows, big_cols, sub_blk = big.block_for(key)
            if sub_blk.size == 0:
                continue
            r_idx = np.fromiter((pos_row[i] for i in big_rows), dtype=np.int64)
            c_idx = np.fromiter((pos_col[j] for j in big_cols), dtype=np.int64)
            blk[np.ix_(r_idx, c_idx)] += sub_blk
        return FpMatrix(blk % p, p)

    ctor = ex.ParamSub if sub else ex.ParamSup
    tag = "sub" if sub else "sup"
    mod = FunctorModule(
        alg,
        [(tag, lab) for lab in big.labels],
        weights,
        block_fn,
        recipe=ctor(f.recipe, v),
        name=f"param_{tag}({f.name}, {v})",
    )
    holder["m"] = mod
    return mod


# ---------------------------------------------------------------------------
# recipes and evaluation

_ALGEBRAS = {}
_ALGEBRA_STORE_LOADER = None


def set_algebra_store_loader(loader):
    """Install a callback (p, n, d) -> structure-constant store, or None.

    Used by the CLI to seed freshly constructed algebras from the on-disk
    cache.  Returns the previous loader.
    """
    global _ALGEBRA_STORE_LOADER
    previous = _ALGEBRA_STORE_LOADER
    _ALGEBRA_STORE_LOADER = loader
    return previous


def get_algebra(p, n, d):
    key = (p, n, d)
    alg = _ALGEBRAS.get(key)
    if alg is None:
        store = _ALGEBRA_STORE_LOADER(p, n, d) if _ALGEBRA_STORE_LOADER else None
        alg = SchurAlgebra(p, n, d, store=store)
        _ALGEBRAS[key] = alg
    return alg


def build_module(recipe, p, n, guard_dim=None):
    """Build the S(n, deg)-module of a functor expression."""
    if guard_dim is not None:
        deg = recipe.degree(p)
        if n**deg > guard_dim or deg > 64:
            raise GuardError(
                f"ambient dimension n^deg = {n}^{deg} exceeds guard {guard_dim}"
            )
    if isinstance(recipe, ex.Sym):
        return make_symmetric(get_algebra(p, n, recipe.k))
    if isinstance(recipe, ex.Div):
        return make_divided(get_algebra(p, n, recipe.k))
    if isinstance(recipe, ex.TensorPow):
        return make_tensor_power(get_algebra(p, n, recipe.k))
    if isinstance(recipe, ex.Ident):
        return make_identity(get_algebra(p, n, 1))
    if isinstance(recipe, ex.Frob):
        return make_frobenius_twist(get_algebra(p, n, p**recipe.r), recipe.r)
    if isinstance(recipe, ex.Dual):
        return kuhn_dual(build_module(recipe.arg, p, n, guard_dim))
    if isinstance(recipe, ex.Twist):
        inner = make_frobenius_twist(get_algebra(p, n, p**recipe.r), recipe.r)
        return compose(recipe.arg, inner, guard_dim=guard_dim)
    if isinstance(recipe, ex.Compose):
        inner = build_module(recipe.inner, p, n, guard_dim)
        return compose(recipe.outer, inner, guard_dim=guard_dim)
    if isinstance(recipe, ex.Tensor):
        mods = [build_module(fac, p, n, guard_dim) for fac in recipe.factors]
        out = mods[0]
        for mod in mods[1:]:
            out = tensor(out, mod)
        return out
    if isinstance(recipe, ex.ParamSub):
        return _parametrize(
            build_module(recipe.arg, p, n, guard_dim), recipe.v, True, guard_dim
        )
    if isinstance(recipe, ex.ParamSup):
        return _parametrize(
            build_module(recipe.arg, p, n, guard_dim), recipe.v, False, guard_dim
        )
    raise TypeError(f"not a functor expression: {recipe!r}")


class GuardError(RuntimeError):
    """Raised when a computation would exceed the configured dimension guard."""


def evaluate(module, w, guard_dim=None):
    """The module of the same functor over S(w, d)."""
    if module.recipe is None:
        raise ValueError("evaluation needs a module with a recipe")
    return build_module(module.recipe, module.p, w, guard_dim=guard_dim)


# ---------------------------------------------------------------------------
# morphisms


class ModuleMap:
    """An equivariant map between modules over the same algebra."""

    def __init__(self, source, target, matrix: FpMatrix):
        if matrix.shape != (target.dim, source.dim):
            raise ValueError("matrix shape does not match modules")
        self.source = source
        self.target = target
        self.matrix = matrix

    def __repr__(self):
        return f"ModuleMap({self.source.name} -> {self.target.name})"

    def is_equivariant(self):
        alg = self.source.algebra
        for t in range(alg.dim):
            lhs = self.matrix @ self.source.act_dense(t)
            rhs = self.target.act_dense(t) @ self.matrix
            if lhs != rhs:
                return False
        return True

    def compose_with(self, other):
        """self after other."""
        if other.target is not self.source and other.target.dim != self.source.dim:
            raise ValueError("maps do not compose")
        return ModuleMap(other.source, self.target, self.matrix @ other.matrix)

    def kernel(self):
        return self.matrix.kernel_basis()

    def image(self):
        return self.matrix.image_basis()

    def rank(self):
        return self.matrix.rank()


def hom_space(f, g):
    """Basis of Hom_{S(n,d)}(F, G) as a list of ModuleMaps.

    Unknowns are the blocks X_lam between equal-weight subspaces; the
    equivariance equations are streamed one algebra basis element at a time,
    intersecting the running solution space.
    """
    if f.algebra is not g.algebra and (
        f.algebra.p != g.algebra.p
        or f.algebra.n != g.algebra.n
        or f.algebra.d != g.algebra.d
    ):
        raise ValueError("hom spaces need a common algebra")
    alg = f.algebra
    p = f.p
    common = [
        w for w in sorted(set(f.by_weight) & set(g.by_weight), reverse=True)
    ]
    sizes = [(w, g.weight_dim(w) * f.weight_dim(w)) for w in common]
    offsets = {}
    off = 0
    for w, size in sizes:
        offsets[w] = off
        off += size
    total = off
    if total == 0:
        return []
    basis = FpMatrix.identity(total, p)
    for t in range(alg.dim):
        if basis.cols == 0:
            break
        lam = alg.left_weights[t]
        mu = alg.right_weights[t]
        if lam not in offsets and mu not in offsets:
            continue
        rows_g, cols_f = g.weight_dim(lam), f.weight_dim(mu)
        if rows_g * cols_f == 0 and (
            f.weight_dim(lam) == 0 or g.weight_dim(mu) == 0
        ):
            continue
        af = f.act_block(t).a.astype(np.int64)
        ag = g.act_block(t).a.astype(np.int64)
        eqs = np.zeros((rows_g * cols_f, total), dtype=np.int64)
        if lam in offsets and af.size:
            # (X_lam @ AF)[a, b]: row-major vec gives kron(I, AF^T)
            blk = np.kron(np.eye(rows_g, dtype=np.int64), af.T)
            eqs[:, offsets[lam] : offsets[lam] + rows_g * f.weight_dim(lam)] += blk
        if mu in offsets and ag.size:
            blk = np.kron(ag, np.eye(cols_f, dtype=np.int64))
            eqs[:, offsets[mu] : offsets[mu] + g.weight_dim(mu) * cols_f] -= blk
        if not eqs.any():
            continue
        basis = intersect_with_kernel(basis, FpMatrix(eqs % p, p))
    maps = []
    for c in range(basis.cols):
        mat = FpMatrix.zeros(g.dim, f.dim, p)
        for w in common:
            rows = g.indices_of_weight(w)
            cols = f.indices_of_weight(w)
            blk = basis.a[offsets[w] : offsets[w] + len(rows) * len(cols), c].reshape(
                len(rows), len(cols)
            )
            mat.a[np.ix_(rows, cols)] = blk
        maps.append(ModuleMap(f, g, mat))
    return maps


def submodule_generated(module, vectors):
    """Column basis of the submodule generated by dense coordinate vectors."""
    alg = module.algebra
    cols = [np.asarray(v, dtype=np.uint8) % module.p for v in vectors]
    images = list(cols)
    for t in range(alg.dim):
        for v in cols:
            img = module.apply(t, v)
            if img.any():
                images.append(img)
    if not images:
        return FpMatrix.zeros(module.dim, 0, module.p)
    stacked = FpMatrix(np.stack(images, axis=1), module.p)
    return stacked.image_basis()

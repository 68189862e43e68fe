"""The Schur algebra S(n, d) = Gamma^d(End k^n) in the orbit-sum basis.

Basis elements are size-d multisets of matrix units E_ij, stored as sorted
tuples of (row, col) pairs; the basis order is lexicographic on these
tuples.  An orbit sum is the sum of all distinct tensor words with the given
multiset of factors, and multiplication is the factor-wise composition of
orbit sums, computed combinatorially without materializing the n^(2d)
dimensional tensor space.
"""

from __future__ import annotations

import itertools
from collections import Counter

from .combinat import divided_power_dim, multiset_permutations


def grosshans_height(lam) -> int:
    """Sum of positive-root coefficients of a GL_n weight.

    Evaluates both closed forms (pairwise differences and the linear form
    with coefficients n - 2i + 1) and insists they agree.
    """
    n = len(lam)
    pairwise = sum(lam[i] - lam[j] for i in range(n) for j in range(i + 1, n))
    linear = sum((n - 2 * (i + 1) + 1) * lam[i] for i in range(n))
    if pairwise != linear:
        raise AssertionError("Grosshans height formulas disagree")
    return pairwise


def row_weight(pairs, n):
    w = [0] * n
    for i, _ in pairs:
        w[i] += 1
    return tuple(w)


def col_weight(pairs, n):
    w = [0] * n
    for _, j in pairs:
        w[j] += 1
    return tuple(w)


def act_on_word(pairs, word):
    """Apply the orbit sum of a matrix-unit multiset to a basis tensor word.

    Returns the list of result words u with positionwise pairs (u_t, word_t)
    forming exactly the given multiset; each occurs with coefficient 1.
    """
    by_col = {}
    for i, j in pairs:
        by_col.setdefault(j, []).append(i)
    counts = Counter(word)
    if {j: len(v) for j, v in by_col.items()} != dict(counts):
        return []
    positions = {}
    for t, letter in enumerate(word):
        positions.setdefault(letter, []).append(t)
    group_choices = []
    for letter in sorted(positions):
        arrangements = list(multiset_permutations(Counter(by_col[letter])))
        group_choices.append((positions[letter], arrangements))
    results = []
    for combo in itertools.product(*(arrs for _, arrs in group_choices)):
        u = [0] * len(word)
        for (pos, _), arrangement in zip(group_choices, combo):
            for t, row in zip(pos, arrangement):
                u[t] = row
        results.append(tuple(u))
    return results


class SchurAlgebra:
    """S(n, d) over F_p with lazily computed, memoized structure constants."""

    def __init__(self, p, n, d, store=None):
        if d < 0 or n < 1:
            raise ValueError("need n >= 1, d >= 0")
        self.p = p
        self.n = n
        self.d = d
        units = [(i, j) for i in range(n) for j in range(n)]
        self.basis = list(itertools.combinations_with_replacement(units, d))
        self.index = {m: t for t, m in enumerate(self.basis)}
        self.dim = len(self.basis)
        assert self.dim == divided_power_dim(n * n, d)
        self.left_weights = [row_weight(m, n) for m in self.basis]
        self.right_weights = [col_weight(m, n) for m in self.basis]
        self.by_left_weight = {}
        self.by_right_weight = {}
        for t in range(self.dim):
            self.by_left_weight.setdefault(self.left_weights[t], []).append(t)
            self.by_right_weight.setdefault(self.right_weights[t], []).append(t)
        self.weights = sorted(self.by_left_weight, reverse=True)
        # store: {left_index: {right_index: {product_index: coeff}}}
        self._rows = store if store is not None else {}

    def __repr__(self):
        return f"SchurAlgebra(p={self.p}, n={self.n}, d={self.d}, dim={self.dim})"

    def unit_coords(self):
        """id^(x d) expanded in orbit sums: all diagonal multisets, coefficient 1."""
        coords = {}
        for lam in self.by_left_weight:
            t = self.weight_idempotent(lam)
            if t is not None:
                coords[t] = 1
        return {t: 1 for t in sorted(coords)}

    def weight_idempotent(self, lam):
        """Index of the orbit sum of E_ii with multiplicity lam_i, if diagonal."""
        pairs = []
        for i, mult in enumerate(lam):
            pairs.extend([(i, i)] * mult)
        return self.index.get(tuple(sorted(pairs)))

    def transpose_index(self, t):
        pairs = tuple(sorted((j, i) for i, j in self.basis[t]))
        return self.index[pairs]

    def multiply_row(self, left):
        """All products e_left * e_right, memoized per left factor."""
        row = self._rows.get(left)
        if row is None:
            row = {}
            rw = self.right_weights[left]
            for right in self.by_left_weight.get(rw, []):
                prod = self._convolve(left, right)
                if prod:
                    row[right] = prod
            self._rows[left] = row
        return row

    def multiply_basis(self, left, right):
        if self.right_weights[left] != self.left_weights[right]:
            return {}
        return self.multiply_row(left).get(right, {})

    def multiply(self, a, b):
        """Product of two elements given as {basis_index: coeff} dicts."""
        out = {}
        for i, ca in a.items():
            if ca % self.p == 0:
                continue
            for j, cb in b.items():
                coeff = (ca * cb) % self.p
                if coeff == 0:
                    continue
                for t, c in self.multiply_basis(i, j).items():
                    out[t] = (out.get(t, 0) + coeff * c) % self.p
        return {t: c for t, c in sorted(out.items()) if c}

    def _convolve(self, left, right):
        """Structure constants of e_left * e_right by orbit-word counting."""
        m_pairs = self.basis[left]
        n_pairs = self.basis[right]
        by_row = {}
        for i, j in n_pairs:
            by_row.setdefault(i, []).append(j)
        word_counts = Counter()
        # the product word is read at the sorted representative, whose row
        # sequence is non-decreasing; only left arrangements with sorted rows
        # can contribute
        m_groups = {}
        for i, j in m_pairs:
            m_groups.setdefault(i, []).append(j)
        m_rows = sorted(m_groups)
        for col_arrs in itertools.product(
            *(multiset_permutations(Counter(m_groups[r])) for r in m_rows)
        ):
            u = tuple(
                (r, c) for r, arr in zip(m_rows, col_arrs) for c in arr
            )
            # positionwise composition: (a,b) then (b,c) -> (a,c)
            groups = {}
            for t, (_, b) in enumerate(u):
                groups.setdefault(b, []).append(t)
            if {b: len(v) for b, v in groups.items()} != {
                b: len(v) for b, v in by_row.items()
            }:
                continue
            letters = sorted(groups)
            arrangement_lists = [
                list(multiset_permutations(Counter(by_row[b]))) for b in letters
            ]
            for combo in itertools.product(*arrangement_lists):
                w = [None] * self.d
                for b, arrangement in zip(letters, combo):
                    for t, c in zip(groups[b], arrangement):
                        w[t] = (u[t][0], c)
                w = tuple(w)
                # the coefficient of e_P is read at one fixed word of P:
                # the sorted representative
                if w == tuple(sorted(w)):
                    word_counts[w] += 1
        out = {}
        for pairs, count in word_counts.items():
            coeff = count % self.p
            if coeff:
                out[self.index[pairs]] = coeff
        return dict(sorted(out.items()))

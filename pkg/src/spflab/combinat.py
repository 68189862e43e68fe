"""Multiset and composition combinatorics shared by the algebra layer."""

from __future__ import annotations

import itertools
from collections import Counter
from math import comb, factorial


def divided_power_dim(u: int, d: int) -> int:
    """dim Gamma^d of a u-dimensional space: multisets of size d (stars and bars)."""
    if u < 0 or d < 0:
        raise ValueError("sizes must be nonnegative")
    if u == 0:
        return 1 if d == 0 else 0
    return comb(u + d - 1, d)


def compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative integers summing to `total`."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for head in range(total, -1, -1):
        for tail in compositions(total - head, parts - 1):
            yield (head,) + tail


def multisets(items, size):
    return itertools.combinations_with_replacement(items, size)


def content(word, alphabet_size):
    """Letter counts of a word over {0..alphabet_size-1}."""
    c = [0] * alphabet_size
    for letter in word:
        c[letter] += 1
    return tuple(c)


def sorted_word(cont):
    """Canonical representative word of a content vector."""
    out = []
    for letter, mult in enumerate(cont):
        out.extend([letter] * mult)
    return tuple(out)


def perm_count(counter: Counter) -> int:
    """Number of distinct arrangements of a multiset."""
    total = sum(counter.values())
    result = factorial(total)
    for mult in counter.values():
        result //= factorial(mult)
    return result


def multiset_permutations(counter: Counter):
    """Distinct arrangements of a multiset, deterministic order."""
    items = sorted(counter.items())
    total = sum(counter.values())

    def rec(remaining, length):
        if length == 0:
            yield ()
            return
        for value, mult in remaining.items():
            if mult == 0:
                continue
            remaining[value] -= 1
            for rest in rec(remaining, length - 1):
                yield (value,) + rest
            remaining[value] += 1

    yield from rec(dict(items), total)


def submultisets(multiset, size):
    """Distinct sub-multisets of the given size (as sorted tuples)."""
    items = sorted(Counter(multiset).items())

    def rec(idx, size):
        if size == 0:
            yield ()
            return
        if idx == len(items):
            return
        value, mult = items[idx]
        for take in range(min(mult, size), -1, -1):
            for rest in rec(idx + 1, size - take):
                yield (value,) * take + rest

    yield from rec(0, size)


def multiset_difference(multiset, sub):
    c = Counter(multiset)
    c.subtract(Counter(sub))
    if any(v < 0 for v in c.values()):
        raise ValueError("not a sub-multiset")
    out = []
    for value in sorted(c, key=lambda x: (x,)):
        out.extend([value] * c[value])
    return tuple(out)

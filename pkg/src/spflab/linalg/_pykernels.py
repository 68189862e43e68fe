"""Fallback elimination kernels in numpy.

Same contract as the compiled `_fastgf` extension: in-place reduced row
echelon form, deterministic pivoting (first row with a nonzero entry in the
current column).  GF(2) matrices are bit-packed into 64-bit words so the
inner loop is word-level XOR either way; the compiled kernel just avoids the
per-pivot numpy overhead.
"""

import numpy as np


def pack_gf2(a):
    """Pack a 0/1 uint8 matrix into uint64 words, little-endian in bit order."""
    m, n = a.shape
    nw = (n + 63) // 64
    padded = np.zeros((m, nw * 64), dtype=np.uint8)
    padded[:, :n] = a
    bits = np.packbits(padded, axis=1, bitorder="little")
    return bits.view(np.uint64).reshape(m, nw)


def unpack_gf2(words, n):
    m = words.shape[0]
    bits = np.unpackbits(words.view(np.uint8).reshape(m, -1), axis=1, bitorder="little")
    return np.ascontiguousarray(bits[:, :n])


def rref_gf2_packed(words, n):
    """In-place RREF of a bit-packed GF(2) matrix; returns pivot columns."""
    m = words.shape[0]
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        w, b = c >> 6, np.uint64(1) << np.uint64(c & 63)
        col = (words[r:, w] & b) != 0
        hits = np.nonzero(col)[0]
        if hits.size == 0:
            continue
        piv = r + int(hits[0])
        if piv != r:
            words[[r, piv]] = words[[piv, r]]
        mask = (words[:, w] & b) != 0
        mask[r] = False
        if mask.any():
            words[mask] ^= words[r]
        pivots.append(c)
        r += 1
    return pivots


def rref_gfp(a, p):
    """In-place RREF of a uint8 matrix mod p; returns pivot columns."""
    m, n = a.shape
    inv = [0] * p
    for x in range(1, p):
        inv[x] = pow(x, p - 2, p)
    pivots = []
    r = 0
    for c in range(n):
        if r >= m:
            break
        hits = np.nonzero(a[r:, c])[0]
        if hits.size == 0:
            continue
        piv = r + int(hits[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        pr = a[r].astype(np.int64)
        if a[r, c] != 1:
            pr = (pr * inv[a[r, c]]) % p
            a[r] = pr.astype(np.uint8)
        mask = a[:, c] != 0
        mask[r] = False
        if mask.any():
            rows = a[mask].astype(np.int64)
            rows = (rows - np.outer(rows[:, c], pr)) % p
            a[mask] = rows.astype(np.uint8)
        pivots.append(c)
        r += 1
    return pivots

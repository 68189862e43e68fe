# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled elimination kernels: bit-packed GF(2) and byte GF(p) RREF.

Pivoting matches `_pykernels` exactly (first nonzero row per column), so the
two backends are bit-for-bit interchangeable.
"""

import numpy as np

cimport numpy as cnp


def rref_gf2_packed(cnp.uint64_t[:, ::1] words, Py_ssize_t n):
    cdef Py_ssize_t m = words.shape[0]
    cdef Py_ssize_t nw = words.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, w, piv
    cdef cnp.uint64_t b, tmp
    pivots = []
    for c in range(n):
        if r >= m:
            break
        w = c >> 6
        b = (<cnp.uint64_t>1) << (c & 63)
        piv = -1
        for i in range(r, m):
            if words[i, w] & b:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(nw):
                tmp = words[r, j]
                words[r, j] = words[piv, j]
                words[piv, j] = tmp
        for i in range(m):
            if i != r and (words[i, w] & b):
                for j in range(nw):
                    words[i, j] ^= words[r, j]
        pivots.append(c)
        r += 1
    return pivots


def rref_gfp(cnp.uint8_t[:, ::1] a, int p):
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, piv
    cdef int x, f, v
    cdef int inv[256]
    for x in range(1, p):
        inv[x] = 1
        for j in range(p - 2):
            inv[x] = (inv[x] * x) % p
    pivots = []
    for c in range(n):
        if r >= m:
            break
        piv = -1
        for i in range(r, m):
            if a[i, c]:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(n):
                x = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = <cnp.uint8_t>x
        if a[r, c] != 1:
            f = inv[a[r, c]]
            for j in range(n):
                a[r, j] = <cnp.uint8_t>((a[r, j] * f) % p)
        for i in range(m):
            if i != r and a[i, c]:
                f = a[i, c]
                for j in range(n):
                    v = a[i, j] - f * a[r, j]
                    v %= p
                    if v < 0:
                        v += p
                    a[i, j] = <cnp.uint8_t>v
        pivots.append(c)
        r += 1
    return pivots

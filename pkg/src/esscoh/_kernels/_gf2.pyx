# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled GF(2) kernels: row reduction and bitmask matrix product.

Same packed layout as the pure backend: uint8 rows, width a multiple of
8 bytes, viewed here as little-endian uint64 words (LSB = lowest column).
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport uint64_t, uint8_t

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil

BACKEND = "compiled"


def rref_inplace(cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] a, int ncols):
    """In-place reduced row echelon form; pivots limited to first ncols bits.

    Returns (rank, pivot_columns).  Row operations span the full packed
    width, so augmented columns to the right of ncols are carried along.
    """
    cdef uint64_t[:, ::1] words = a.view(np.uint64)
    cdef Py_ssize_t nrows = words.shape[0]
    cdef Py_ssize_t nwords = words.shape[1]
    cdef Py_ssize_t rank = 0
    cdef Py_ssize_t col, w, r, k, p
    cdef int b
    cdef uint64_t bit, tmp
    pivots = []
    for col in range(ncols):
        w = col >> 6
        b = col & 63
        bit = (<uint64_t>1) << b
        p = -1
        for r in range(rank, nrows):
            if words[r, w] & bit:
                p = r
                break
        if p < 0:
            continue
        if p != rank:
            for k in range(nwords):
                tmp = words[rank, k]
                words[rank, k] = words[p, k]
                words[p, k] = tmp
        for r in range(nrows):
            if r != rank and (words[r, w] & bit):
                for k in range(nwords):
                    words[r, k] ^= words[rank, k]
        pivots.append(col)
        rank += 1
        if rank == nrows:
            break
    return rank, pivots


def mask_matmul(cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] masks, int nbits,
                cnp.ndarray[cnp.uint8_t, ndim=2, mode="c"] source, out=None):
    """out[r] = XOR of source[c] over set bits c < nbits of masks row r."""
    if out is None:
        out = np.zeros((masks.shape[0], source.shape[1]), dtype=np.uint8)
    cdef uint64_t[:, ::1] m = masks.view(np.uint64)
    cdef uint64_t[:, ::1] src = source.view(np.uint64)
    cdef uint64_t[:, ::1] o = out.view(np.uint64)
    cdef Py_ssize_t nrows = m.shape[0]
    cdef Py_ssize_t nw_out = src.shape[1]
    cdef Py_ssize_t r, w, k, c, base
    cdef int b, limit
    cdef uint64_t word
    cdef Py_ssize_t full_words = nbits >> 6
    cdef int tail = nbits & 63
    for r in range(nrows):
        for w in range(full_words + (1 if tail else 0)):
            word = m[r, w]
            if w == full_words:
                word &= ((<uint64_t>1) << tail) - 1
            if word == 0:
                continue
            base = w << 6
            while word:
                b = __builtin_ctzll(word)
                word &= word - 1
                c = base + b
                for k in range(nw_out):
                    o[r, k] ^= src[c, k]
    return out

"""Pure-Python (numpy) GF(2) kernels.

Fallback implementations of the two hot primitives.  Matrices are
bit-packed: uint8 arrays of shape (rows, width_bytes) with width_bytes a
multiple of 8, column j stored in byte j // 8, bit j % 8 (LSB first).
Row operations are vectorized over the packed words; only the pivot loop
runs in Python.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def rref_inplace(a: np.ndarray, ncols: int) -> tuple[int, list[int]]:
    """Reduce `a` to reduced row echelon form over GF(2), in place.

    Pivots are searched in the first `ncols` bit-columns only; row
    operations apply to the full packed width (so callers may carry
    augmented columns on the right).

    Returns (rank, pivot_columns).
    """
    words = a.view(np.uint64)
    nrows = a.shape[0]
    rank = 0
    pivots: list[int] = []
    for col in range(ncols):
        w, b = divmod(col, 64)
        colbits = (words[rank:, w] >> np.uint64(b)) & np.uint64(1)
        nz = np.nonzero(colbits)[0]
        if nz.size == 0:
            continue
        p = rank + int(nz[0])
        if p != rank:
            tmp = words[rank].copy()
            words[rank] = words[p]
            words[p] = tmp
        hit = np.nonzero((words[:, w] >> np.uint64(b)) & np.uint64(1))[0]
        hit = hit[hit != rank]
        if hit.size:
            words[hit] ^= words[rank]
        pivots.append(col)
        rank += 1
        if rank == nrows:
            break
    return rank, pivots


def mask_matmul(masks: np.ndarray, nbits: int, source: np.ndarray,
                out: np.ndarray | None = None) -> np.ndarray:
    """GF(2) product of a bitmask matrix with a packed row matrix.

    out[r] = XOR of source[c] over all set bits c < nbits of masks row r.
    masks: (R, Wm) packed; source: (N, Ws) packed with N >= nbits.
    """
    nrows = masks.shape[0]
    if out is None:
        out = np.zeros((nrows, source.shape[1]), dtype=np.uint8)
    bits = np.unpackbits(masks, axis=1, count=nbits, bitorder="little")
    for r in range(nrows):
        idx = np.nonzero(bits[r])[0]
        if idx.size:
            out[r] ^= np.bitwise_xor.reduce(source[idx], axis=0)
    return out

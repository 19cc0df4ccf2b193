"""Exact dense linear algebra over F_2, bit-packed.

Everything downstream (resolutions, cohomology, restriction kernels)
reduces to the operations here.  Vectors over F_2 are packed LSB-first
into uint8 rows whose byte width is a multiple of 8, so rows can be
viewed as little-endian uint64 words by the kernels.

The data model carries the prime p for forward compatibility; this
version computes over p = 2 only.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from ._kernels import mask_matmul as _raw_mask_matmul
from ._kernels import rref_inplace
from .errors import DimensionMismatch

_CHUNK_BYTES = 1 << 23


def packed_width(cols: int) -> int:
    """Packed byte width for a row of `cols` bits (multiple of 8 bytes)."""
    return ((cols + 63) // 64) * 8


def packed_zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, packed_width(cols)), dtype=np.uint8)


def pack_rows(dense: np.ndarray, cols: int | None = None) -> np.ndarray:
    """Pack a dense 0/1 uint8 matrix into rows of packed bytes."""
    dense = np.ascontiguousarray(dense, dtype=np.uint8)
    if dense.ndim == 1:
        dense = dense.reshape(1, -1)
    if cols is None:
        cols = dense.shape[1]
    out = packed_zeros(dense.shape[0], cols)
    if cols:
        packed = np.packbits(dense, axis=1, bitorder="little")
        out[:, : packed.shape[1]] = packed
    return out


def unpack_rows(packed: np.ndarray, cols: int) -> np.ndarray:
    """Inverse of pack_rows; returns uint8 dense matrix of shape (rows, cols)."""
    if cols == 0:
        return np.zeros((packed.shape[0], 0), dtype=np.uint8)
    return np.unpackbits(packed, axis=1, count=cols, bitorder="little")


def transpose_packed(packed: np.ndarray, cols: int) -> np.ndarray:
    """Transpose a packed matrix (rows x cols bits -> cols x rows bits)."""
    rows = packed.shape[0]
    out = packed_zeros(cols, rows)
    if rows == 0 or cols == 0:
        return out
    # Chunk over input rows to bound the dense intermediate.
    step = max(1, _CHUNK_BYTES // max(1, cols))
    for lo in range(0, rows, step):
        hi = min(rows, lo + step)
        dense = unpack_rows(packed[lo:hi], cols)
        part = np.packbits(dense.T, axis=1, bitorder="little")
        byte_lo, bit_lo = divmod(lo, 8)
        if bit_lo == 0:
            out[:, byte_lo : byte_lo + part.shape[1]] ^= part
        else:  # pragma: no cover - chunk step is a multiple of 8
            raise AssertionError("chunk misalignment")
    return out


def mask_matmul_packed(masks: np.ndarray, nbits: int, source: np.ndarray,
                       out: np.ndarray | None = None) -> np.ndarray:
    """out[r] = XOR of source rows selected by the first nbits of masks row r."""
    if out is None:
        out = np.zeros((masks.shape[0], source.shape[1]), dtype=np.uint8)
    if masks.shape[0] == 0 or nbits == 0 or source.shape[1] == 0:
        return out
    _raw_mask_matmul(np.ascontiguousarray(masks), nbits,
                     np.ascontiguousarray(source), out)
    return out


def first_set_bit(row: np.ndarray, nbits: int) -> int:
    """Index of the lowest set bit of a packed row, or -1 if zero."""
    words = row.view(np.uint64)
    nz = np.nonzero(words)[0]
    if nz.size == 0:
        return -1
    w = int(nz[0])
    v = int(words[w])
    bit = w * 64 + ((v & -v).bit_length() - 1)
    return bit if bit < nbits else -1


class FpMatrix:
    """Immutable dense matrix over the prime field F_p (p = 2).

    Rows are bit-packed; use from_dense/to_dense at the boundary.  All
    operations on FpMatrix are pure functions, so values can be shared
    freely between threads.
    """

    __slots__ = ("rows", "cols", "p", "packed")

    def __init__(self, packed: np.ndarray, rows: int, cols: int, p: int = 2):
        if p != 2:
            raise NotImplementedError("only p = 2 is supported in this version")
        self.rows = rows
        self.cols = cols
        self.p = p
        packed = np.ascontiguousarray(packed, dtype=np.uint8)
        packed.setflags(write=False)
        self.packed = packed

    @classmethod
    def from_dense(cls, data, cols: int | None = None, p: int = 2) -> "FpMatrix":
        dense = np.asarray(data, dtype=np.uint8)
        if dense.ndim == 1:
            dense = dense.reshape(1, -1)
        if np.any(dense > 1):
            dense = dense % 2
        if cols is None:
            cols = dense.shape[1]
        return cls(pack_rows(dense, cols), dense.shape[0], cols, p)

    @classmethod
    def from_packed(cls, packed: np.ndarray, cols: int, p: int = 2) -> "FpMatrix":
        return cls(packed, packed.shape[0], cols, p)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int = 2) -> "FpMatrix":
        return cls(packed_zeros(rows, cols), rows, cols, p)

    @classmethod
    def identity(cls, n: int, p: int = 2) -> "FpMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8), p=p)

    def to_dense(self) -> np.ndarray:
        return unpack_rows(self.packed, self.cols)

    def entries(self) -> list[int]:
        """Entries in row-major order."""
        return self.to_dense().reshape(-1).tolist()

    def get(self, i: int, j: int) -> int:
        return int((self.packed[i, j // 8] >> (j % 8)) & 1)

    def is_zero(self) -> bool:
        return not self.packed.any()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FpMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and np.array_equal(self.packed, other.packed)
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.packed.tobytes()))

    def __repr__(self):
        return f"FpMatrix({self.rows}x{self.cols}, p={self.p})"


class RrefResult:
    __slots__ = ("rank", "reduced", "pivots")

    def __init__(self, rank: int, reduced: FpMatrix, pivots: tuple[int, ...]):
        self.rank = rank
        self.reduced = reduced
        self.pivots = pivots

    def __iter__(self):
        return iter((self.rank, self.reduced, self.pivots))


def rref(m: FpMatrix) -> RrefResult:
    """Reduced row echelon form; preserves the row space."""
    work = m.packed.copy()
    rk, piv = rref_inplace(work, m.cols)
    return RrefResult(rk, FpMatrix.from_packed(work, m.cols, m.p), tuple(piv))


def rank(m: FpMatrix) -> int:
    work = m.packed.copy()
    rk, _ = rref_inplace(work, m.cols)
    return rk


def row_space_basis(m: FpMatrix) -> FpMatrix:
    """Canonical basis (nonzero rref rows) of the row space."""
    rk, red, _ = rref(m)
    return FpMatrix.from_packed(red.packed[:rk].copy(), m.cols, m.p)


def kernel_basis(m: FpMatrix) -> FpMatrix:
    """Canonical basis of the right null space, one row per basis vector.

    Row count is cols - rank(m); each row v satisfies m @ v = 0.
    """
    rk, red, piv = rref(m)
    return _kernel_from_rref(red.packed, rk, piv, m.cols, m.p)


def _kernel_from_rref(red_packed: np.ndarray, rk: int, piv: Sequence[int],
                      cols: int, p: int = 2) -> FpMatrix:
    pivset = set(piv)
    free = [c for c in range(cols) if c not in pivset]
    out = packed_zeros(len(free), cols)
    dense_red = unpack_rows(red_packed[:rk], cols) if rk else None
    dense = np.zeros((len(free), cols), dtype=np.uint8)
    for k, f in enumerate(free):
        dense[k, f] = 1
        if rk:
            colvals = dense_red[:, f]
            for r in np.nonzero(colvals)[0]:
                dense[k, piv[r]] ^= 1
    out = pack_rows(dense, cols)
    return FpMatrix.from_packed(out, cols, p)


def intersect_rowspaces(ms: Sequence[FpMatrix]) -> FpMatrix:
    """Basis of the intersection of the row spaces (Zassenhaus)."""
    if not ms:
        raise DimensionMismatch("need at least one matrix")
    cols = ms[0].cols
    for m in ms:
        if m.cols != cols:
            raise DimensionMismatch(
                f"column counts differ: {m.cols} != {cols}")
    acc = ms[0]
    for m in ms[1:]:
        acc = _intersect_pair(acc, m)
    return row_space_basis(acc)


def _intersect_pair(a: FpMatrix, b: FpMatrix) -> FpMatrix:
    # Zassenhaus: rref of [A|A; B|0]; rows with zero left half carry the
    # intersection basis in the right half.
    cols = a.cols
    wb = packed_width(cols)
    n = a.rows + b.rows
    aug = np.zeros((n, 2 * wb), dtype=np.uint8)
    aug[: a.rows, :wb] = a.packed
    aug[: a.rows, wb:] = a.packed
    aug[a.rows :, :wb] = b.packed
    cap = wb * 8
    rk, piv = rref_inplace(aug, cap + cols)
    left_piv = sum(1 for c in piv if c < cap)
    inter = aug[left_piv:rk, wb:].copy()
    return FpMatrix.from_packed(inter, cols, a.p)


def solve(m: FpMatrix, b) -> Optional[np.ndarray]:
    """Solve m @ x = b; returns the pivot-only solution or None.

    The returned solution has zeros in every free-variable position,
    which makes downstream chain lifts reproducible.
    """
    bvec = np.asarray(b, dtype=np.uint8).reshape(-1) % 2
    if bvec.shape[0] != m.rows:
        raise DimensionMismatch(
            f"rhs length {bvec.shape[0]} != rows {m.rows}")
    solver = Gf2Solver(m.packed, m.cols)
    xs, ok = solver.solve_rows(pack_rows(bvec.reshape(1, -1), m.rows))
    if not ok[0]:
        return None
    return unpack_rows(xs[:1], m.cols).reshape(-1)


class Gf2Solver:
    """Factorization of a packed matrix for repeated exact solves.

    Runs one row reduction of [A | I] and answers every later solve with
    a bit-matrix product.  Solutions are pivot-only (free variables zero).
    """

    __slots__ = ("rows", "cols", "rank", "pivots", "_wb_a", "_transform",
                 "_reduced")

    def __init__(self, packed: np.ndarray, cols: int):
        rows = packed.shape[0]
        wb_a = packed_width(cols)
        wb_i = packed_width(rows)
        aug = np.zeros((rows, wb_a + wb_i), dtype=np.uint8)
        aug[:, : packed.shape[1]] = packed
        eye = np.eye(rows, dtype=np.uint8)
        aug[:, wb_a:] = pack_rows(eye, rows) if rows else aug[:, wb_a:]
        rk, piv = rref_inplace(aug, cols)
        self.rows = rows
        self.cols = cols
        self.rank = rk
        self.pivots = tuple(piv)
        self._wb_a = wb_a
        self._reduced = aug[:, :wb_a].copy()
        self._transform = np.ascontiguousarray(aug[:, wb_a:])

    def solve_rows(self, rhs_rows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Solve A x = y for each packed row y of rhs_rows (length = rows).

        Returns (solutions as packed rows of length cols, ok bool array).
        """
        k = rhs_rows.shape[0]
        if k == 0:
            return packed_zeros(0, self.cols), np.zeros(0, dtype=bool)
        # Columns of the stacked RHS matrix, one packed row per equation.
        ymat = transpose_packed(rhs_rows, self.rows)
        u = mask_matmul_packed(self._transform, self.rows, ymat)
        u_dense = unpack_rows(u, k)
        if self.rank < self.rows:
            ok = ~u_dense[self.rank :].any(axis=0)
        else:
            ok = np.ones(k, dtype=bool)
        xs = np.zeros((k, self.cols), dtype=np.uint8)
        if self.rank:
            xs[:, np.array(self.pivots, dtype=np.int64)] = u_dense[: self.rank].T
        return pack_rows(xs, self.cols), ok


class SpanAccumulator:
    """Growing row space kept in reduced echelon form.

    add() reduces a vector against the current basis and reports whether
    it enlarged the span; the greedy complement constructions use this.
    """

    __slots__ = ("cols", "_wb", "_rows", "_pivots")

    def __init__(self, cols: int):
        self.cols = cols
        self._wb = packed_width(cols)
        self._rows: list[np.ndarray] = []
        self._pivots: list[int] = []

    @property
    def dim(self) -> int:
        return len(self._rows)

    def _reduce(self, vec: np.ndarray) -> np.ndarray:
        v = vec.copy()
        for row, piv in zip(self._rows, self._pivots):
            if (v[piv // 8] >> (piv % 8)) & 1:
                v ^= row
        return v

    def contains(self, vec: np.ndarray) -> bool:
        return not self._reduce(vec).any()

    def add(self, vec: np.ndarray) -> bool:
        """Insert vec's reduction; True iff the span grew."""
        v = self._reduce(vec)
        piv = first_set_bit(v, self.cols)
        if piv < 0:
            return False
        for row in self._rows:
            if (row[piv // 8] >> (piv % 8)) & 1:
                row ^= v
        idx = 0
        while idx < len(self._pivots) and self._pivots[idx] < piv:
            idx += 1
        self._rows.insert(idx, v)
        self._pivots.insert(idx, piv)
        return True

    def add_many(self, packed: np.ndarray) -> None:
        for i in range(packed.shape[0]):
            self.add(packed[i])

    def basis_packed(self) -> np.ndarray:
        if not self._rows:
            return packed_zeros(0, self.cols)
        return np.stack(self._rows)

    def basis(self) -> FpMatrix:
        return FpMatrix.from_packed(self.basis_packed(), self.cols)


def span_basis(vectors: Iterable[np.ndarray], cols: int) -> np.ndarray:
    """Canonical rref basis of the span of packed row vectors."""
    acc = SpanAccumulator(cols)
    for v in vectors:
        acc.add(v)
    return acc.basis_packed()


def block_parities(packed: np.ndarray, nblocks: int, blocksize: int) -> np.ndarray:
    """Per-row parity of each length-`blocksize` block; packed result.

    Input rows have nblocks * blocksize bits; output rows have nblocks.
    """
    rows = packed.shape[0]
    if rows == 0 or nblocks == 0:
        return packed_zeros(rows, nblocks)
    dense = unpack_rows(packed, nblocks * blocksize)
    sums = np.bitwise_xor.reduce(
        dense.reshape(rows, nblocks, blocksize), axis=2)
    return pack_rows(sums, nblocks)


def permute_columns(packed: np.ndarray, cols: int, perm: np.ndarray) -> np.ndarray:
    """Reorder bit columns: out[:, k] = in[:, perm[k]]."""
    rows = packed.shape[0]
    if rows == 0 or cols == 0:
        return packed_zeros(rows, len(perm))
    out = packed_zeros(rows, len(perm))
    step = max(1, _CHUNK_BYTES // max(1, cols))
    for lo in range(0, rows, step):
        hi = min(rows, lo + step)
        dense = unpack_rows(packed[lo:hi], cols)
        out[lo:hi] = pack_rows(dense[:, perm], len(perm))
    return out


def block_column_gather(packed: np.ndarray, nblocks: int, blocksize: int,
                        idx: np.ndarray) -> np.ndarray:
    """Expand each row into len(idx) permuted copies.

    idx has shape (E, blocksize); output row r*E + e is the input row r
    with block-local columns permuted by idx[e]:
        out[r*E+e][(i, h)] = in[r][(i, idx[e][h])].
    Used to expand module-map generator images into their translates.
    """
    rows = packed.shape[0]
    e_cnt = idx.shape[0]
    cols = nblocks * blocksize
    out = packed_zeros(rows * e_cnt, cols)
    if rows == 0 or cols == 0 or e_cnt == 0:
        return out
    step = max(1, _CHUNK_BYTES // max(1, cols * e_cnt))
    for lo in range(0, rows, step):
        hi = min(rows, lo + step)
        dense = unpack_rows(packed[lo:hi], cols).reshape(hi - lo, nblocks, blocksize)
        # (chunk, nblocks, E, blocksize) -> rows ordered (r, e)
        shifted = dense[:, :, idx]
        shifted = shifted.transpose(0, 2, 1, 3).reshape((hi - lo) * e_cnt, cols)
        out[lo * e_cnt : hi * e_cnt] = pack_rows(shifted, cols)
    return out

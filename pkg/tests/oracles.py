"""Independent brute-force oracles for low-degree cohomology.

Everything here is deliberately separate from the engine: cochains on
the (unnormalized) bar complex, functions on n-tuples of group elements,
with a small int-bitset Gaussian elimination of its own.  Slow and
obviously correct; usable for |G| <= 8 and degree <= 3.
"""

from __future__ import annotations

import itertools


def bitset_rref(rows: list[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form of int-bitset rows; returns (rows, pivots)."""
    work = [r for r in rows]
    pivots: list[int] = []
    rank = 0
    for col in range(ncols):
        piv = None
        for r in range(rank, len(work)):
            if (work[r] >> col) & 1:
                piv = r
                break
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        for r in range(len(work)):
            if r != rank and ((work[r] >> col) & 1):
                work[r] ^= work[rank]
        pivots.append(col)
        rank += 1
        if rank == len(work):
            break
    return work[:rank], pivots


def bitset_rank(rows: list[int], ncols: int) -> int:
    return len(bitset_rref(rows, ncols)[0])


def bitset_kernel(rows: list[int], ncols: int) -> list[int]:
    """Basis of {x : M x = 0} for the matrix whose rows are the bitsets."""
    red, pivots = bitset_rref(rows, ncols)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        vec = 1 << free
        for r, p in zip(red, pivots):
            if (r >> free) & 1:
                vec ^= 1 << p
        basis.append(vec)
    return basis


class BitSpan:
    """Row space in echelon form with membership and insertion."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: list[int] = []
        self.pivots: list[int] = []

    def reduce(self, vec: int) -> int:
        for row, piv in zip(self.rows, self.pivots):
            if (vec >> piv) & 1:
                vec ^= row
        return vec

    def contains(self, vec: int) -> bool:
        return self.reduce(vec) == 0

    def add(self, vec: int) -> bool:
        vec = self.reduce(vec)
        if vec == 0:
            return False
        piv = (vec & -vec).bit_length() - 1
        for i in range(len(self.rows)):
            if (self.rows[i] >> piv) & 1:
                self.rows[i] ^= vec
        self.rows.append(vec)
        self.pivots.append(piv)
        return True

    @property
    def dim(self) -> int:
        return len(self.rows)


def _tuples(order: int, n: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(order), repeat=n))


def bar_delta(table, n: int) -> tuple[list[int], int, int]:
    """Matrix of the bar-cochain differential C^n -> C^{n+1}.

    Rows are indexed by (n+1)-tuples (outputs), bitsets over n-tuples
    (inputs).  Returns (rows, n_inputs, n_outputs).
    """
    order = len(table)
    ins = _tuples(order, n)
    in_index = {t: i for i, t in enumerate(ins)}
    outs = _tuples(order, n + 1)
    rows = []
    for out in outs:
        acc = 0
        acc ^= 1 << in_index[out[1:]]
        for i in range(n):
            merged = out[:i] + (table[out[i]][out[i + 1]],) + out[i + 2:]
            acc ^= 1 << in_index[merged]
        acc ^= 1 << in_index[out[:-1]]
        rows.append(acc)
    return rows, len(ins), len(outs)


def bar_cocycles(table, n: int) -> list[int]:
    """Basis of Z^n as bitsets over n-tuples (n >= 1)."""
    rows, n_in, _ = bar_delta(table, n)
    return bitset_kernel(rows, n_in)


def bar_coboundaries(table, n: int) -> list[int]:
    """Spanning set of B^n = image of delta on C^{n-1} (n >= 1)."""
    if n == 0:
        return []
    order = len(table)
    prev = _tuples(order, n - 1)
    rows, n_in, n_out = bar_delta(table, n - 1)
    # rows are indexed by outputs with bitsets over inputs; transpose to
    # get the image vectors delta(e_i) as bitsets over outputs.
    images = []
    for i in range(n_in):
        acc = 0
        for o in range(n_out):
            if (rows[o] >> i) & 1:
                acc ^= 1 << o
        images.append(acc)
    return images


def bar_cohomology_dim(table, n: int) -> int:
    """dim H^n(G, F_2) via bar cocycles modulo coboundaries."""
    if n == 0:
        return 1
    order = len(table)
    n_in = order ** n
    z = bar_cocycles(table, n)
    b = bar_coboundaries(table, n)
    return len(z) - bitset_rank(b, n_in)


def _restrict_tuple_indices(order: int, n: int, elements) -> list[int]:
    """Indices of H^n-tuples inside the G^n-tuple enumeration."""
    g_index = {t: i for i, t in enumerate(_tuples(order, n))}
    return [g_index[t] for t in itertools.product(elements, repeat=n)]


def bar_essential_dim(table, n: int, proper_subgroup_elements) -> int:
    """dim of classes restricting to a coboundary on every proper subgroup."""
    order = len(table)
    n_in = order ** n
    z = bar_cocycles(table, n)
    conditions: list[int] = []  # rows over the Z-basis coefficients
    for elements in proper_subgroup_elements:
        h_table = [[None] * len(elements) for _ in elements]
        local = {e: i for i, e in enumerate(elements)}
        for a in elements:
            for b in elements:
                h_table[local[a]][local[b]] = local[table[a][b]]
        h_n = len(elements) ** n
        b_span = BitSpan(h_n)
        for vec in bar_coboundaries(h_table, n):
            b_span.add(vec)
        sel = _restrict_tuple_indices(order, n, elements)
        residues = []
        for zvec in z:
            restricted = 0
            for k, idx in enumerate(sel):
                if (zvec >> idx) & 1:
                    restricted ^= 1 << k
            residues.append(b_span.reduce(restricted))
        # Linear conditions on coefficient vectors c: sum c_i residues_i = 0.
        for bit in range(h_n):
            row = 0
            for i, r in enumerate(residues):
                if (r >> bit) & 1:
                    row ^= 1 << i
            if row:
                conditions.append(row)
    inside = bitset_kernel(conditions, len(z)) if conditions else \
        [1 << i for i in range(len(z))]
    b_rank = bitset_rank(bar_coboundaries(table, n), n_in)
    return len(inside) - b_rank


def bar_cup_square_degree1(table, hom) -> bool:
    """Whether the cup square of a degree-1 class vanishes in H^2.

    hom: values of a homomorphism G -> F_2 on element indices.
    The cup product of 1-cochains is (f u g)(a, b) = f(a) g(b).
    """
    order = len(table)
    pairs = _tuples(order, 2)
    square = 0
    for k, (a, b) in enumerate(pairs):
        if hom[a] and hom[b]:
            square ^= 1 << k
    span = BitSpan(order ** 2)
    for vec in bar_coboundaries(table, 2):
        span.add(vec)
    return span.contains(square)

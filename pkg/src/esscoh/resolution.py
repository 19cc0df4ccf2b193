"""Minimal free resolutions of k over the group algebra kG, degreewise.

A free kG-module of rank r carries the basis (generator, group element);
G permutes the group coordinate, so equivariance of every stored map is
structural.  A kG-map is stored by the images of its generators at the
identity, one packed bit row per generator; the full k-linear matrix is
materialized on demand by translating those rows around the group.

Minimality (every differential lands in the radical times the target)
makes dim H^n equal to the number of degree-n generators, which is what
the rest of the engine consumes.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from . import linalg
from .errors import DegreeLimitError, EngineIntegrityError, GroupValidationError
from .grouptheory import GroupTable, Subgroup, check_homomorphism
from .linalg import (
    Gf2Solver,
    SpanAccumulator,
    block_column_gather,
    block_parities,
    mask_matmul_packed,
    packed_zeros,
    transpose_packed,
)

DEFAULT_COLUMN_CAP = 12000

_DEGREE_CAPS = {1: 12, 2: 12, 4: 12, 8: 12, 16: 10, 32: 8, 64: 6}


def default_maxdeg(order: int) -> int:
    """Degree cap keeping dense differential matrices tractable."""
    if order in _DEGREE_CAPS:
        return _DEGREE_CAPS[order]
    return 4


def _left_translation_index(group: GroupTable, elems: Sequence[int]) -> np.ndarray:
    """idx[e][h] = elems[e]^-1 * h, the column gather that left-translates."""
    out = np.empty((len(elems), group.order), dtype=np.int64)
    for k, e in enumerate(elems):
        out[k] = group.table[int(group.inv[e])]
    return out


def translate_rows(imgs: np.ndarray, nblocks: int, group: GroupTable,
                   elems: Sequence[int]) -> np.ndarray:
    """Rows (j, e) = elems[e] acting on imgs row j."""
    idx = _left_translation_index(group, elems)
    return block_column_gather(imgs, nblocks, group.order, idx)


def kgmap_full_matrix_t(imgs: np.ndarray, target_rank: int,
                        group: GroupTable) -> np.ndarray:
    """Transposed full matrix of a kG-map: row (j, g) is the image of (j, g)."""
    return translate_rows(imgs, target_rank, group, range(group.order))


def kgmap_compose(d_imgs: np.ndarray, src_prev_rank: int, src_group: GroupTable,
                  f_imgs: np.ndarray, f_target_rank: int, tgt_group: GroupTable,
                  phi: np.ndarray) -> np.ndarray:
    """Generator images of f o d, where d is a kK-map and f is kK-linear
    into a kG-module pulled back along phi: K -> G.

    d_imgs bits run over (generator, K-element) pairs; each set bit
    contributes the phi-translate of the matching f image.
    """
    idx = np.empty((src_group.order, tgt_group.order), dtype=np.int64)
    for x in range(src_group.order):
        idx[x] = tgt_group.table[int(tgt_group.inv[int(phi[x])])]
    expanded = block_column_gather(f_imgs, f_target_rank, tgt_group.order, idx)
    nbits = src_prev_rank * src_group.order
    return mask_matmul_packed(d_imgs, nbits, expanded)


class FreeResolution:
    """Shared behaviour of minimal and tensor-product resolutions.

    Concrete classes fill in: group, ranks, diffs (generator-image packed
    arrays, diffs[0] = None), computed_maxdeg, truncated, reason.
    """

    group: GroupTable
    ranks: list[int]
    diffs: list[Optional[np.ndarray]]
    computed_maxdeg: int
    truncated: bool
    truncation_reason: str

    def __init__(self):
        self._solvers: dict[int, Gf2Solver] = {}
        self._full_t: dict[int, np.ndarray] = {}

    def dim(self, n: int) -> int:
        self._check_degree(n)
        return self.ranks[n]

    def _check_degree(self, n: int) -> None:
        if n < 0 or n > self.computed_maxdeg:
            raise DegreeLimitError(
                f"degree {n} outside computed range 0..{self.computed_maxdeg}"
                f" for {self.group.name}")

    def module_dim(self, n: int) -> int:
        return self.ranks[n] * self.group.order

    def full_matrix_t(self, n: int) -> np.ndarray:
        """Transpose of the full k-linear matrix of D_n (rows = columns of D_n)."""
        self._check_degree(n)
        if n == 0:
            raise DegreeLimitError("D_0 does not exist; the augmentation is implicit")
        if n not in self._full_t:
            self._full_t[n] = kgmap_full_matrix_t(
                self.diffs[n], self.ranks[n - 1], self.group)
        return self._full_t[n]

    def full_matrix(self, n: int) -> np.ndarray:
        return transpose_packed(self.full_matrix_t(n), self.module_dim(n - 1))

    def solver(self, n: int) -> Gf2Solver:
        """Prefactored solver for D_n x = y (used by every chain lift)."""
        if n not in self._solvers:
            self._solvers[n] = Gf2Solver(self.full_matrix(n), self.module_dim(n))
        return self._solvers[n]

    def differential_rank(self, n: int) -> int:
        return self.solver(n).rank

    def check_dd_zero(self, n: int) -> bool:
        """D_{n-1} o D_n = 0, verified on generator columns.

        Equivariance is structural, so vanishing on the generators at the
        identity is vanishing everywhere.
        """
        if n < 2:
            return True
        comp = kgmap_compose(
            self.diffs[n], self.ranks[n - 1], self.group,
            self.diffs[n - 1], self.ranks[n - 2], self.group,
            np.arange(self.group.order))
        return not comp.any()

    def check_minimality(self, n: int) -> bool:
        """Image of D_n inside radical * P_{n-1}: every block has even parity.

        Equivalently the induced differentials on Hom(P_*, k) vanish.
        """
        if n < 1:
            return True
        bs = block_parities(self.diffs[n], self.ranks[n - 1], self.group.order)
        return not bs.any()

    def check_exactness(self, n: int) -> bool:
        """dim ker D_n = dim im D_{n+1} (n = 0 checks against the augmentation)."""
        if n >= self.computed_maxdeg:
            raise DegreeLimitError(f"exactness at {n} needs degree {n + 1}")
        if n == 0:
            # ker(augmentation) has dimension |G| - 1.
            return self.differential_rank(1) == self.group.order - 1
        ker_dim = self.module_dim(n) - self.differential_rank(n)
        return ker_dim == self.differential_rank(n + 1)


class MinimalResolution(FreeResolution):
    """Minimal free resolution of the trivial module, computed degreewise.

    ranks[n] = dim H^n(G).  The generator images of D_1 are group-algebra
    elements (g - 1); the chosen g's are recorded in degree1_elements and
    realize the identification of H^1 with Hom(G, F_2).
    """

    def __init__(self, group: GroupTable, maxdeg: int,
                 column_cap: Optional[int] = DEFAULT_COLUMN_CAP):
        super().__init__()
        if maxdeg < 0:
            raise ValueError("maxdeg must be >= 0")
        self.group = group
        self.maxdeg = maxdeg
        self.column_cap = column_cap
        self.ranks = [1]
        self.diffs: list[Optional[np.ndarray]] = [None]
        self.degree1_elements: list[int] = []
        self.truncated = False
        self.truncation_reason = ""
        self.computed_maxdeg = 0
        self._build()

    def _build(self) -> None:
        group = self.group
        order = group.order
        if self.maxdeg == 0:
            return
        # Kernel of the augmentation: spanned by (g - 1), canonical order.
        aug = linalg.FpMatrix.from_dense(np.ones((1, order), dtype=np.uint8))
        kernel = linalg.kernel_basis(aug).packed
        ker_cols = order
        for n in range(1, self.maxdeg + 1):
            picked, elements = self._minimal_generators(kernel, ker_cols, n == 1)
            self.ranks.append(picked.shape[0])
            self.diffs.append(picked)
            if n == 1:
                self.degree1_elements = elements
            self.computed_maxdeg = n
            if picked.shape[0] == 0:
                # Trivial group: resolution stops; pad explicitly.
                for m in range(n + 1, self.maxdeg + 1):
                    self.ranks.append(0)
                    self.diffs.append(packed_zeros(0, self.ranks[m - 1] * order))
                    self.computed_maxdeg = m
                return
            if n == self.maxdeg:
                return
            cols = self.ranks[n] * order
            if self.column_cap is not None and cols > self.column_cap:
                self.truncated = True
                self.truncation_reason = (
                    f"degree bound reduced to {n}: next differential would have "
                    f"{cols} columns (cap {self.column_cap})")
                return
            full = self.full_matrix(n)
            kernel = self._kernel_rows(full, cols)
            ker_cols = cols

    @classmethod
    def from_data(cls, group: GroupTable, maxdeg: int, ranks: list[int],
                  diffs: list[Optional[np.ndarray]], degree1_elements: list[int],
                  truncated: bool, truncation_reason: str,
                  column_cap: Optional[int]) -> "MinimalResolution":
        """Rebuild a resolution from stored data (no recomputation).

        Callers must revalidate the invariants; see the cache module.
        """
        obj = cls.__new__(cls)
        FreeResolution.__init__(obj)
        obj.group = group
        obj.maxdeg = maxdeg
        obj.column_cap = column_cap
        obj.ranks = list(ranks)
        obj.diffs = diffs
        obj.degree1_elements = list(degree1_elements)
        obj.truncated = truncated
        obj.truncation_reason = truncation_reason
        obj.computed_maxdeg = len(ranks) - 1
        return obj

    @staticmethod
    def _kernel_rows(full_packed: np.ndarray, cols: int) -> np.ndarray:
        m = linalg.FpMatrix.from_packed(full_packed.copy(), cols)
        return linalg.kernel_basis(m).packed

    def _minimal_generators(self, kernel: np.ndarray, cols: int,
                            record_elements: bool) -> tuple[np.ndarray, list[int]]:
        """Lift a basis of ker/(rad * ker): greedy complement in pivot order."""
        group = self.group
        acc = SpanAccumulator(cols)
        if kernel.shape[0]:
            for g in group.generators:
                shifted = translate_rows(kernel, cols // group.order, group, [g])
                shifted ^= kernel
                acc.add_many(shifted)
        picked_rows = []
        elements: list[int] = []
        for i in range(kernel.shape[0]):
            if acc.add(kernel[i]):
                picked_rows.append(kernel[i].copy())
                if record_elements:
                    # Degree-1 kernel rows are e_0 + e_g in canonical order.
                    bit = linalg.first_set_bit(kernel[i], cols)
                    other = linalg.unpack_rows(kernel[i].reshape(1, -1), cols)[0]
                    nz = np.nonzero(other)[0]
                    elements.append(int(nz[1]) if bit == 0 else int(nz[0]))
        if picked_rows:
            picked = np.stack(picked_rows)
        else:
            picked = packed_zeros(0, cols)
        return picked, elements


def minimal_resolution(group: GroupTable, maxdeg: int,
                       column_cap: Optional[int] = DEFAULT_COLUMN_CAP) -> MinimalResolution:
    """Compute the minimal resolution up to maxdeg (or the column cap)."""
    return MinimalResolution(group, maxdeg, column_cap=column_cap)


class SubgroupBasis:
    """A free kG-module seen over a subgroup H: coset representatives.

    The kH-basis of P_n is (generator, rep) over the lexicographically
    least representatives of the right cosets Hg.
    """

    def __init__(self, res: FreeResolution, sub: Subgroup):
        self.resolution = res
        self.subgroup = sub
        parent = res.group
        if sub.parent.table_bytes() != parent.table_bytes():
            raise GroupValidationError("subgroup belongs to a different group")
        seen = set()
        reps = []
        for g in range(parent.order):
            if g not in seen:
                reps.append(g)
                for h in sub.elements:
                    seen.add(int(parent.table[h, g]))
        self.reps = tuple(reps)

    @property
    def index(self) -> int:
        return len(self.reps)

    def rank(self, n: int) -> int:
        return self.resolution.ranks[n] * self.index

    def ranks_list(self) -> list[int]:
        return [self.rank(n) for n in range(self.resolution.computed_maxdeg + 1)]

    def column_permutation(self, n: int) -> np.ndarray:
        """Map kH-coordinates ((gen, rep), h) to parent coordinates (gen, g)."""
        parent = self.resolution.group
        sub_order = self.subgroup.order
        r = self.resolution.ranks[n]
        perm = np.empty(r * parent.order, dtype=np.int64)
        pos = 0
        for i in range(r):
            for rep in self.reps:
                for h in self.subgroup.elements:
                    g = int(parent.table[h, rep])
                    perm[pos] = i * parent.order + g
                    pos += 1
        assert pos == r * parent.order
        return perm

    def diff_imgs_over_subgroup(self, n: int) -> np.ndarray:
        """Images of the kH-generators of P_n under D_n, in kH-coordinates."""
        res = self.resolution
        parent = res.group
        imgs = translate_rows(res.diffs[n], res.ranks[n - 1], parent, self.reps)
        perm = self.column_permutation(n - 1)  # new position -> parent position
        return linalg.permute_columns(imgs, res.ranks[n - 1] * parent.order, perm)


def restrict_to_subgroup(res: FreeResolution, sub: Subgroup) -> SubgroupBasis:
    """The resolution regarded as a complex of free kH-modules."""
    return SubgroupBasis(res, sub)


class ChainMap:
    """A chain map between free resolutions over possibly different groups.

    imgs[n] holds the images of the source generators of degree n inside
    the target module P^tgt_n, as packed rows; the map is equivariant for
    the source group acting on the target through phi.
    """

    def __init__(self, source: FreeResolution, target: FreeResolution,
                 phi: np.ndarray, imgs: list[np.ndarray]):
        self.source = source
        self.target = target
        self.phi = phi
        self.imgs = imgs

    @property
    def maxdeg(self) -> int:
        return len(self.imgs) - 1

    def cochain_matrix(self, n: int) -> np.ndarray:
        """Dense matrix of the induced map Hom(P^tgt_n, k) -> Hom(P^src_n, k).

        Shape (source ranks[n], target ranks[n]): row t is the block-parity
        pairing of the image of source generator t.
        """
        bs = block_parities(self.imgs[n], self.target.ranks[n],
                            self.target.group.order)
        return linalg.unpack_rows(bs, self.target.ranks[n])


def lift_along_hom(phi: np.ndarray, source: FreeResolution,
                   target: FreeResolution, up_to: Optional[int] = None,
                   verify: bool = True) -> ChainMap:
    """Chain map over the source group algebra lifting the identity of k.

    phi maps source elements to target elements and must be a verified
    homomorphism; the target is exact, so each degree solves uniquely up
    to homotopy with the deterministic pivot-only solution.
    """
    if verify:
        phi = check_homomorphism(phi, source.group, target.group)
    else:
        phi = np.asarray(phi, dtype=np.int32)
    if up_to is None:
        up_to = min(source.computed_maxdeg, target.computed_maxdeg)
    if up_to > source.computed_maxdeg or up_to > target.computed_maxdeg:
        raise DegreeLimitError("resolutions not computed deep enough for lift")
    tgt_order = target.group.order
    imgs: list[np.ndarray] = []
    base = packed_zeros(source.ranks[0], tgt_order)
    for i in range(source.ranks[0]):
        base[i, 0] = 1  # generator -> identity of the target group algebra
    imgs.append(base)
    for n in range(1, up_to + 1):
        rhs = kgmap_compose(
            source.diffs[n], source.ranks[n - 1], source.group,
            imgs[n - 1], target.ranks[n - 1], target.group, phi)
        if source.ranks[n] == 0:
            imgs.append(packed_zeros(0, target.ranks[n] * tgt_order))
            continue
        sol, ok = target.solver(n).solve_rows(rhs)
        if not ok.all():
            raise EngineIntegrityError(
                f"chain lift unsolvable at degree {n}: target complex not exact?")
        imgs.append(sol)
    return ChainMap(source, target, phi, imgs)


class TensorResolution(FreeResolution):
    """Tensor product of two minimal resolutions over k[A x B].

    This is itself a free resolution of k over the product group algebra
    (Kunneth), and it is minimal because both factors are: differentials
    stay inside the radical.  Its generators are bigraded, which is what
    makes it the natural home for Kunneth bases.
    """

    def __init__(self, res_a: FreeResolution, res_b: FreeResolution,
                 product: GroupTable, maxdeg: Optional[int] = None):
        super().__init__()
        na, nb = res_a.group.order, res_b.group.order
        if product.order != na * nb:
            raise GroupValidationError("product table does not match factors")
        depth = min(res_a.computed_maxdeg, res_b.computed_maxdeg)
        if maxdeg is None:
            maxdeg = depth
        if maxdeg > depth:
            raise DegreeLimitError(
                f"tensor resolution to degree {maxdeg} needs both factors to {maxdeg}")
        self.factor_a = res_a
        self.factor_b = res_b
        self.group = product
        self.maxdeg = maxdeg
        self.computed_maxdeg = maxdeg
        self.truncated = False
        self.truncation_reason = ""
        self.gen_triples: list[list[tuple[int, int, int]]] = []
        self._gen_lookup: list[dict[tuple[int, int, int], int]] = []
        for n in range(maxdeg + 1):
            triples = []
            for i in range(n + 1):
                j = n - i
                if i <= res_a.computed_maxdeg and j <= res_b.computed_maxdeg:
                    for a in range(res_a.ranks[i]):
                        for b in range(res_b.ranks[j]):
                            triples.append((i, a, b))
            self.gen_triples.append(triples)
            self._gen_lookup.append({t: k for k, t in enumerate(triples)})
        self.ranks = [len(t) for t in self.gen_triples]
        self.diffs = [None]
        for n in range(1, maxdeg + 1):
            self.diffs.append(self._build_diff(n))

    def _build_diff(self, n: int) -> np.ndarray:
        res_a, res_b = self.factor_a, self.factor_b
        na, nb = res_a.group.order, res_b.group.order
        total = na * nb
        prev = self.ranks[n - 1]
        out = packed_zeros(self.ranks[n], prev * total)
        lookup = self._gen_lookup[n - 1]
        for row, (i, a, b) in enumerate(self.gen_triples[n]):
            j = n - i
            if i >= 1:
                da = res_a.diffs[i]
                dense = linalg.unpack_rows(da[a].reshape(1, -1),
                                           res_a.ranks[i - 1] * na)[0]
                for q in np.nonzero(dense)[0]:
                    a2, ga = divmod(int(q), na)
                    tgt = lookup[(i - 1, a2, b)]
                    bit = tgt * total + ga * nb
                    out[row, bit // 8] ^= 1 << (bit % 8)
            if j >= 1:
                db = res_b.diffs[j]
                dense = linalg.unpack_rows(db[b].reshape(1, -1),
                                           res_b.ranks[j - 1] * nb)[0]
                for q in np.nonzero(dense)[0]:
                    b2, gb = divmod(int(q), nb)
                    tgt = lookup[(i, a, b2)]
                    bit = tgt * total + gb
                    out[row, bit // 8] ^= 1 << (bit % 8)
        return out

    def component_rows(self, n: int, i: int) -> np.ndarray:
        """Generator indices at degree n with first (A-side) degree i."""
        return np.array([k for k, (ii, _, _) in enumerate(self.gen_triples[n])
                         if ii == i], dtype=np.int64)

"""Maps between cohomology rings: restriction, transfer, Kunneth, comodule map.

All of them come down to chain maps between free resolutions:

* restriction along H <= G lifts the inclusion H -> G and precomposes;
* transfer lifts a comparison from the restricted complex P^G|_H back to
  the minimal resolution of H and sums the coset blocks;
* the Kunneth identification compares the minimal resolution of a product
  with the tensor product of the factors' resolutions (which is again
  minimal, so induced matrices are canonical, not choices);
* the comodule map lifts group multiplication G x C -> G into the tensor
  resolution of (G, C), landing directly in Kunneth coordinates.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from . import linalg
from .errors import EngineIntegrityError, GroupValidationError
from .grouptheory import GroupTable, Subgroup, direct_product
from .resolution import (
    FreeResolution,
    TensorResolution,
    lift_along_hom,
    restrict_to_subgroup,
)
from .ringops import CohClass, RingSlice


class RingMap:
    """Degree-preserving multiplicative map between cohomology rings.

    matrices[n] is dense uint8 of shape (dim target^n, dim source^n);
    apply() is matrix-vector multiplication mod 2.
    """

    def __init__(self, label: str, source: FreeResolution, target: FreeResolution,
                 matrices: list[np.ndarray]):
        self.label = label
        self.source = source
        self.target = target
        self.matrices = matrices

    @property
    def maxdeg(self) -> int:
        return len(self.matrices) - 1

    def matrix(self, n: int) -> np.ndarray:
        return self.matrices[n]

    def apply(self, c: CohClass) -> CohClass:
        m = self.matrices[c.degree]
        return CohClass(c.degree, (m @ c.vector) % 2, self.target)


class ModuleMap(RingMap):
    """Linear, module-structured map (transfer): same storage as RingMap."""


def restriction(res_g: FreeResolution, sub: Subgroup, res_h: FreeResolution,
                up_to: Optional[int] = None) -> RingMap:
    """Restriction H^*(G) -> H^*(H) induced by the inclusion of a subgroup.

    res_h must resolve the subgroup's abstract table (sub.as_group_table()).
    """
    phi = sub.inclusion_map()
    lift = lift_along_hom(phi, res_h, res_g, up_to=up_to)
    mats = [lift.cochain_matrix(n) for n in range(lift.maxdeg + 1)]
    return RingMap(f"res[{res_g.group.name}->{sub.order}]", res_g, res_h, mats)


class _RestrictedComplex:
    """P^G seen as a complex of free kH-modules (adapter for lifting)."""

    def __init__(self, res_g: FreeResolution, sub: Subgroup, h_table: GroupTable,
                 up_to: int):
        basis = restrict_to_subgroup(res_g, sub)
        self.group = h_table
        self.computed_maxdeg = up_to
        self.ranks = [basis.rank(n) for n in range(up_to + 1)]
        self.diffs = [None] + [basis.diff_imgs_over_subgroup(n)
                               for n in range(1, up_to + 1)]
        self.reps = basis.reps


def transfer(res_g: FreeResolution, sub: Subgroup, res_h: FreeResolution,
             up_to: Optional[int] = None) -> ModuleMap:
    """Chain-level transfer H^*(H) -> H^*(G).

    A cochain on the subgroup's resolution is pulled to the restricted
    complex by a comparison map and then summed over coset blocks; the
    target Hom complex has zero differentials, so the resulting matrix is
    canonical.
    """
    if up_to is None:
        up_to = min(res_g.computed_maxdeg, res_h.computed_maxdeg)
    h_table = res_h.group
    if h_table.order != sub.order:
        raise GroupValidationError("resolution does not match the subgroup")
    restricted = _RestrictedComplex(res_g, sub, h_table, up_to)
    ident = np.arange(h_table.order, dtype=np.int32)
    comparison = lift_along_hom(ident, restricted, res_h, up_to=up_to,
                                verify=False)
    nreps = len(restricted.reps)
    h_order = h_table.order
    mats = []
    for n in range(up_to + 1):
        bs = linalg.block_parities(comparison.imgs[n], res_h.ranks[n], h_order)
        dense = linalg.unpack_rows(bs, res_h.ranks[n])
        dense = dense.reshape(res_g.ranks[n], nreps, res_h.ranks[n])
        mats.append(np.bitwise_xor.reduce(dense, axis=1))
    return ModuleMap(f"tr[{sub.order}->{res_g.group.name}]", res_h, res_g, mats)


class KunnethSplit:
    """Identification H^n(A x B) = sum over i+j=n of H^i(A) (x) H^j(B).

    to_tensor[n] rewrites a class on the minimal resolution of the product
    in the bigraded tensor basis; from_tensor[n] is its inverse.  Both are
    induced by comparison chain maps between the two resolutions; since
    both complexes are minimal the matrices are canonical and mutually
    inverse, which is asserted at construction.
    """

    def __init__(self, tensor: TensorResolution, res_prod: FreeResolution,
                 maxdeg: int):
        self.tensor = tensor
        self.resolution = res_prod
        self.maxdeg = maxdeg
        for n in range(maxdeg + 1):
            if tensor.ranks[n] != res_prod.ranks[n]:
                raise EngineIntegrityError(
                    f"Kunneth dimension mismatch at degree {n}: "
                    f"{tensor.ranks[n]} != {res_prod.ranks[n]}")
        ident = np.arange(tensor.group.order, dtype=np.int32)
        cmp_in = lift_along_hom(ident, tensor, res_prod, up_to=maxdeg,
                                verify=False)
        cmp_out = lift_along_hom(ident, res_prod, tensor, up_to=maxdeg,
                                 verify=False)
        self.to_tensor = [cmp_in.cochain_matrix(n) for n in range(maxdeg + 1)]
        self.from_tensor = [cmp_out.cochain_matrix(n) for n in range(maxdeg + 1)]
        for n in range(maxdeg + 1):
            d = tensor.ranks[n]
            eye = np.eye(d, dtype=np.uint8)
            if not (np.array_equal((self.to_tensor[n] @ self.from_tensor[n]) % 2, eye)
                    and np.array_equal((self.from_tensor[n] @ self.to_tensor[n]) % 2, eye)):
                raise EngineIntegrityError(
                    f"Kunneth comparison maps not mutually inverse at degree {n}")

    def split_class(self, c: CohClass) -> np.ndarray:
        """Coordinates of a class over the bigraded generator triples."""
        return (self.to_tensor[c.degree] @ c.vector) % 2

    def dims_check(self, res_a: FreeResolution, res_b: FreeResolution) -> bool:
        for n in range(self.maxdeg + 1):
            total = sum(res_a.ranks[i] * res_b.ranks[n - i]
                        for i in range(n + 1))
            if total != self.resolution.ranks[n]:
                return False
        return True


def kunneth_split(res_a: FreeResolution, res_b: FreeResolution,
                  product: GroupTable, res_prod: FreeResolution,
                  maxdeg: Optional[int] = None) -> KunnethSplit:
    """Compare the minimal resolution of a product with the tensor resolution."""
    if maxdeg is None:
        maxdeg = min(res_prod.computed_maxdeg,
                     res_a.computed_maxdeg, res_b.computed_maxdeg)
    tensor = TensorResolution(res_a, res_b, product, maxdeg=maxdeg)
    return KunnethSplit(tensor, res_prod, maxdeg)


def kunneth_product(slice_a: RingSlice, slice_b: RingSlice,
                    tensor: TensorResolution,
                    x: np.ndarray, m: int, y: np.ndarray, n: int) -> np.ndarray:
    """Bigraded product of Kunneth coordinate vectors (degrees m and n)."""
    out_deg = m + n
    lookup = tensor._gen_lookup[out_deg]
    out = np.zeros(tensor.ranks[out_deg], dtype=np.uint8)
    triples_m = tensor.gen_triples[m]
    triples_n = tensor.gen_triples[n]
    for p in np.nonzero(x)[0]:
        i1, a1, b1 = triples_m[int(p)]
        for q in np.nonzero(y)[0]:
            i2, a2, b2 = triples_n[int(q)]
            i = i1 + i2
            j = out_deg - i
            ta = slice_a.tables[(i1, i2)][a1, a2]
            tb = slice_b.tables[(m - i1, n - i2)][b1, b2]
            for a3 in np.nonzero(ta)[0]:
                for b3 in np.nonzero(tb)[0]:
                    out[lookup[(i, int(a3), int(b3))]] ^= 1
    return out


class ComoduleMap:
    """The map H^*(G) -> H^*(G) (x) H^*(C) induced by multiplication G x C -> G.

    C is the largest central elementary abelian subgroup.  The lift goes
    straight into the tensor resolution of (G, C), so matrices[n] has one
    row per bigraded generator triple and the counit identities are exact
    matrix statements:
      rows with C-degree 0 form the identity, and
      rows with G-degree 0 form the restriction to C.
    """

    def __init__(self, res_g: FreeResolution, centre_sub: Subgroup,
                 res_c: FreeResolution, tensor: TensorResolution,
                 matrices: list[np.ndarray], res_to_c: RingMap):
        self.res_g = res_g
        self.centre_sub = centre_sub
        self.res_c = res_c
        self.tensor = tensor
        self.matrices = matrices
        self.res_to_c = res_to_c

    @property
    def maxdeg(self) -> int:
        return len(self.matrices) - 1

    def apply(self, c: CohClass) -> np.ndarray:
        return (self.matrices[c.degree] @ c.vector) % 2

    def component(self, n: int, i: int) -> np.ndarray:
        """Submatrix of rows with G-degree i (shape: those rows x dim H^n(G))."""
        rows = self.tensor.component_rows(n, i)
        return self.matrices[n][rows]

    def check_counit_identity(self, n: int) -> bool:
        """(Id (x) augmentation) o comodule map = identity, exactly."""
        block = self.component(n, n)
        return np.array_equal(block, np.eye(self.res_g.ranks[n], dtype=np.uint8))

    def check_counit_restriction(self, n: int) -> bool:
        """(augmentation (x) Id) o comodule map = restriction to C, exactly."""
        block = self.component(n, 0)
        return np.array_equal(block, self.res_to_c.matrices[n])

    def check_injective(self, n: int) -> bool:
        """Split monomorphism: the degree-n matrix has full column rank."""
        m = linalg.FpMatrix.from_dense(self.matrices[n])
        return linalg.rank(m) == self.res_g.ranks[n]


def comodule_map(res_g: FreeResolution, centre_sub: Subgroup,
                 res_c: FreeResolution, res_to_c: RingMap,
                 maxdeg: Optional[int] = None) -> ComoduleMap:
    """Lift multiplication G x C -> G into the tensor resolution of (G, C)."""
    g = res_g.group
    c_elems = centre_sub.elements
    c_table = res_c.group
    if c_table.order != len(c_elems):
        raise GroupValidationError("centre resolution does not match the subgroup")
    product = direct_product(g, c_table, name=f"{g.name}x(C)")
    if maxdeg is None:
        maxdeg = min(res_g.computed_maxdeg, res_c.computed_maxdeg)
    tensor = TensorResolution(res_g, res_c, product, maxdeg=maxdeg)
    nc = c_table.order
    mu = np.empty(g.order * nc, dtype=np.int32)
    for x in range(g.order):
        for y in range(nc):
            mu[x * nc + y] = g.table[x, c_elems[y]]
    lift = lift_along_hom(mu, tensor, res_g, up_to=maxdeg)
    mats = [lift.cochain_matrix(n) for n in range(maxdeg + 1)]
    return ComoduleMap(res_g, centre_sub, res_c, tensor, mats, res_to_c)

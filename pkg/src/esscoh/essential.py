"""The essential ideal and its module structure over a polynomial subalgebra.

Essential classes are those restricting to zero on every proper subgroup;
since every proper subgroup of a 2-group sits inside a maximal one and
restriction factors through it, intersecting the kernels of restriction
to the maximal subgroups suffices (the brute-force all-subgroup version
lives in the test oracles).

The main verdicts: find homogeneous classes whose restrictions to the
maximal central elementary abelian subgroup C form a homogeneous system
of parameters for H^*(C), then compare the essential ideal's dimensions
degreewise against a free module over the polynomial algebra on them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import linalg
from .errors import EngineIntegrityError
from .induced import ComoduleMap, KunnethSplit, RingMap
from .linalg import SpanAccumulator, pack_rows, unpack_rows
from .resolution import FreeResolution
from .ringops import CohClass, RingSlice, series_coefficients


class GradedSubspace:
    """Per-degree subspaces of H^n(G), bases kept in canonical rref form."""

    def __init__(self, ambient_dims: Sequence[int],
                 bases: list[np.ndarray]):
        self.ambient_dims = list(ambient_dims)
        self.bases = bases  # packed, one array per degree

    @property
    def maxdeg(self) -> int:
        return len(self.bases) - 1

    @property
    def dims(self) -> list[int]:
        return [b.shape[0] for b in self.bases]

    def dim(self, n: int) -> int:
        return self.bases[n].shape[0]

    def basis_dense(self, n: int) -> np.ndarray:
        return unpack_rows(self.bases[n], self.ambient_dims[n])

    def span(self, n: int) -> SpanAccumulator:
        acc = SpanAccumulator(self.ambient_dims[n])
        acc.add_many(self.bases[n])
        return acc

    def is_zero(self) -> bool:
        return all(b.shape[0] == 0 for b in self.bases)


def _kernel_subspace(matrices: list[np.ndarray], ambient: int) -> np.ndarray:
    """Packed canonical basis of the joint kernel of stacked dense matrices."""
    stacked = [m for m in matrices if m.shape[0]]
    if not stacked:
        eye = np.eye(ambient, dtype=np.uint8)
        return pack_rows(eye, ambient) if ambient else linalg.packed_zeros(0, 0)
    m = linalg.FpMatrix.from_dense(np.concatenate(stacked, axis=0))
    return linalg.kernel_basis(m).packed


def essential_ideal(res_g: FreeResolution, restrictions: Iterable[RingMap],
                    maxdeg: Optional[int] = None) -> GradedSubspace:
    """Classes restricting to zero on every maximal subgroup; degree 0 excluded."""
    restrictions = list(restrictions)
    if maxdeg is None:
        maxdeg = res_g.computed_maxdeg
    dims = res_g.ranks[: maxdeg + 1]
    bases = [linalg.packed_zeros(0, dims[0])]
    for n in range(1, maxdeg + 1):
        bases.append(_kernel_subspace([r.matrices[n] for r in restrictions],
                                      dims[n]))
    return GradedSubspace(dims, bases)


def restriction_kernel_ideal(res_g: FreeResolution, res_to_c: RingMap,
                             maxdeg: Optional[int] = None) -> GradedSubspace:
    """Kernel of restriction to the maximal central elementary abelian subgroup."""
    if maxdeg is None:
        maxdeg = res_g.computed_maxdeg
    dims = res_g.ranks[: maxdeg + 1]
    bases = [linalg.packed_zeros(0, dims[0])]
    for n in range(1, maxdeg + 1):
        bases.append(_kernel_subspace([res_to_c.matrices[n]], dims[n]))
    return GradedSubspace(dims, bases)


def transfer_images(transfers: Iterable[RingMap], maxdeg: int,
                    ambient_dims: Sequence[int]) -> GradedSubspace:
    """Span of the images of all given transfer maps, degreewise."""
    bases = []
    transfers = list(transfers)
    for n in range(maxdeg + 1):
        acc = SpanAccumulator(ambient_dims[n])
        for t in transfers:
            m = t.matrices[n]
            if m.shape[1]:
                acc.add_many(pack_rows(m.T % 2, ambient_dims[n]))
        bases.append(acc.basis_packed())
    return GradedSubspace(list(ambient_dims), bases)


def transfer_ideal(slice_g: RingSlice, transfers: Iterable[RingMap],
                   maxdeg: Optional[int] = None) -> GradedSubspace:
    """The ideal generated by all transfer images from the maximal subgroups.

    Transfers from non-maximal proper subgroups factor through maximal
    ones by transitivity, so these generate the full transfer ideal.
    """
    if maxdeg is None:
        maxdeg = slice_g.maxdeg
    dims = slice_g.dims[: maxdeg + 1]
    images = transfer_images(transfers, maxdeg, dims)
    bases = []
    for n in range(maxdeg + 1):
        acc = SpanAccumulator(dims[n])
        for j in range(1, n + 1):
            img = images.basis_dense(j)
            if not img.shape[0]:
                continue
            i = n - j
            table = slice_g.tables[(i, j)]
            # rows: products (basis of H^i) x (image vectors)
            prods = np.einsum("tb,sbk->tsk", img, table) % 2
            acc.add_many(pack_rows(prods.reshape(-1, dims[n]), dims[n]))
        bases.append(acc.basis_packed())
    return GradedSubspace(dims, bases)


def annihilation_check(slice_g: RingSlice, left: GradedSubspace,
                       right: GradedSubspace) -> bool:
    """Every product of a left basis element with a right one vanishes."""
    maxdeg = slice_g.maxdeg
    for i in range(1, maxdeg + 1):
        li = left.basis_dense(i)
        if not li.shape[0]:
            continue
        for j in range(1, maxdeg + 1 - i):
            rj = right.basis_dense(j)
            if not rj.shape[0]:
                continue
            table = slice_g.tables[(i, j)]
            # prods[a, d, k]: (left basis a) . (e_d); contract with right basis
            prods = np.einsum("ab,bdk->adk", li, table) % 2
            full = np.einsum("adk,cd->ack", prods, rj) % 2
            if full.any():
                return False
    return True


def containment_check(inner: GradedSubspace, outer: GradedSubspace) -> bool:
    """inner_n inside outer_n for every degree."""
    for n in range(min(inner.maxdeg, outer.maxdeg) + 1):
        if inner.dim(n) == 0:
            continue
        span = outer.span(n)
        for row in inner.bases[n]:
            if not span.contains(row):
                return False
    return True


# ---------------------------------------------------------------------------
# Polynomial coordinates on H^*(C) for an elementary abelian C.

def poly_mul(p: frozenset, q: frozenset) -> frozenset:
    out: set[tuple[int, ...]] = set()
    for a in p:
        for b in q:
            m = tuple(x + y for x, y in zip(a, b))
            if m in out:
                out.remove(m)
            else:
                out.add(m)
    return frozenset(out)


def monomials_of_degree(d: int, n: int) -> list[tuple[int, ...]]:
    """All exponent tuples of total degree n in d variables, sorted."""
    if d == 0:
        return [()] if n == 0 else []
    out = []
    for first in range(n, -1, -1):
        for rest in monomials_of_degree(d - 1, n - first):
            out.append((first,) + rest)
    return out


class ElementaryAbelianModel:
    """Monomial coordinates on the polynomial ring H^*(C), C = (C2)^d.

    The degree-1 canonical basis classes are the variables; each degree's
    monomial products are computed once through the ring slice and give a
    square change of basis to and from canonical coordinates.
    """

    def __init__(self, slice_c: RingSlice, d: int):
        self.slice_c = slice_c
        self.d = d
        if slice_c.dims[1] != d and d > 0:
            raise EngineIntegrityError("H^1(C) dimension does not match the rank")
        self._monomial_classes: dict[int, dict[tuple[int, ...], np.ndarray]] = {
            0: {(0,) * d: np.ones(1, dtype=np.uint8)}}
        self._solvers: dict[int, linalg.Gf2Solver] = {}

    def _variables(self) -> list[CohClass]:
        return self.slice_c.basis(1)

    def monomial_classes(self, n: int) -> dict[tuple[int, ...], np.ndarray]:
        """Canonical coordinate vector of each degree-n monomial."""
        if n not in self._monomial_classes:
            prev = self.monomial_classes(n - 1)
            out: dict[tuple[int, ...], np.ndarray] = {}
            for mono in monomials_of_degree(self.d, n):
                # Divide by the first variable with positive exponent.
                i = next(k for k, e in enumerate(mono) if e > 0)
                lower = tuple(e - (1 if k == i else 0) for k, e in enumerate(mono))
                var = self._variables()[i]
                lower_cls = self.slice_c.cls(n - 1, prev[lower])
                out[mono] = self.slice_c.product(var, lower_cls).vector
            self._monomial_classes[n] = out
        return self._monomial_classes[n]

    def monomial_matrix(self, n: int) -> tuple[list[tuple[int, ...]], np.ndarray]:
        monos = monomials_of_degree(self.d, n)
        classes = self.monomial_classes(n)
        mat = np.stack([classes[m] for m in monos]) if monos else \
            np.zeros((0, self.slice_c.dims[n]), dtype=np.uint8)
        return monos, mat

    def to_poly(self, c: CohClass) -> frozenset:
        """Express a canonical H^n(C) class as a set of monomials (F_2)."""
        n = c.degree
        monos, mat = self.monomial_matrix(n)
        if len(monos) != self.slice_c.dims[n]:
            raise EngineIntegrityError(
                f"H^{n}(C) is not spanned by {len(monos)} monomials")
        if n not in self._solvers:
            packed = pack_rows(mat.T % 2, len(monos))
            self._solvers[n] = linalg.Gf2Solver(packed, len(monos))
        sol, ok = self._solvers[n].solve_rows(
            pack_rows(c.vector.reshape(1, -1), self.slice_c.dims[n]))
        if not ok[0]:
            raise EngineIntegrityError("class not in the monomial span")
        coeffs = unpack_rows(sol[:1], len(monos))[0]
        return frozenset(m for m, bit in zip(monos, coeffs) if bit)


def is_hsop_on_restrictions(polys: Sequence[frozenset], d: int) -> bool:
    """Decide whether d homogeneous polynomials cut k[t_1..t_d] to finite length.

    Exact test: for a complete intersection the quotient's socle sits in
    degree sum(deg r_i - 1), so the ideal must fill the whole graded piece
    one degree above; any survivor there certifies failure.
    """
    if len(polys) != d:
        raise ValueError(f"an hsop for a rank-{d} ring needs exactly {d} elements")
    if d == 0:
        return True
    if any(not p for p in polys):
        return False
    degrees = [sum(next(iter(p))) for p in polys]
    target = sum(e - 1 for e in degrees) + 1
    monos = monomials_of_degree(d, target)
    index = {m: k for k, m in enumerate(monos)}
    acc = SpanAccumulator(len(monos))
    full = len(monos)
    for poly, e in zip(polys, degrees):
        for m in monomials_of_degree(d, target - e):
            prod = poly_mul(poly, frozenset([m]))
            vec = np.zeros(len(monos), dtype=np.uint8)
            for term in prod:
                vec[index[term]] = 1
            acc.add(pack_rows(vec.reshape(1, -1), len(monos))[0])
            if acc.dim == full:
                return True
    return acc.dim == full


@dataclass
class HsopCandidate:
    """Homogeneous classes whose restrictions to C form an hsop for H^*(C)."""

    classes: list[CohClass]
    degrees: list[int]
    restriction_polys: list[frozenset]

    def max_degree(self) -> int:
        return max(self.degrees)


def candidate_pool(slice_g: RingSlice, res_to_c: RingMap,
                   model: ElementaryAbelianModel, degree_cap: int):
    """Generator monomials with nonzero restriction to C, deduplicated.

    Returns (classes, polys) sorted by (degree, first appearance).
    """
    ordered = [g for g in slice_g.generators if g.degree <= degree_cap]
    seen = {(c.degree, c.vector.tobytes()) for c in ordered}
    idx = 0
    while idx < len(ordered):
        c = ordered[idx]
        idx += 1
        for gen in slice_g.generators:
            nd = c.degree + gen.degree
            if nd > degree_cap or nd > slice_g.maxdeg:
                continue
            prod = slice_g.product(gen, c)
            if prod.is_zero():
                continue
            key = (nd, prod.vector.tobytes())
            if key not in seen:
                seen.add(key)
                ordered.append(prod)
    ordered.sort(key=lambda c: c.degree)
    classes, polys = [], []
    seen_polys = set()
    for c in ordered:
        restr = res_to_c.apply(c)
        if restr.is_zero():
            continue
        poly = model.to_poly(restr)
        if poly in seen_polys:
            continue
        seen_polys.add(poly)
        classes.append(c)
        polys.append(poly)
    return classes, polys


def find_hsop(slice_g: RingSlice, res_to_c: RingMap,
              model: ElementaryAbelianModel, d: int,
              degree_cap: Optional[int] = None,
              eval_cap: int = 200_000) -> Optional[HsopCandidate]:
    """Backtracking search for an hsop-restricting sequence.

    Candidates are generator monomials in ascending degree with nonzero
    restriction; tuples are tried in lexicographic order of that list and
    the first passing tuple wins.  Returns None when the cap is exhausted
    (a reportable outcome: existence beyond the bound is not refuted).
    """
    if degree_cap is None:
        degree_cap = max(8, 2 * int(round(slice_g.group.order ** 0.5)))
    degree_cap = min(degree_cap, slice_g.maxdeg)
    if d == 0:
        return HsopCandidate([], [], [])
    classes, polys = candidate_pool(slice_g, res_to_c, model, degree_cap)
    evals = 0
    for combo in itertools.combinations(range(len(classes)), d):
        evals += 1
        if evals > eval_cap:
            return None
        chosen = [polys[i] for i in combo]
        if is_hsop_on_restrictions(chosen, d):
            return HsopCandidate([classes[i] for i in combo],
                                 [classes[i].degree for i in combo],
                                 chosen)
    return None


def minimal_generators_over_hsop(ess: GradedSubspace, hsop: HsopCandidate,
                                 slice_g: RingSlice,
                                 maxdeg: Optional[int] = None
                                 ) -> tuple[list[int], list[CohClass]]:
    """Degrees and representatives of a minimal generating set of Ess over R.

    Degreewise complement of R_+ . Ess inside Ess, greedy in the canonical
    basis order of the essential bases.
    """
    if maxdeg is None:
        maxdeg = min(ess.maxdeg, slice_g.maxdeg)
    degrees: list[int] = []
    reps: list[CohClass] = []
    for n in range(1, maxdeg + 1):
        acc = SpanAccumulator(ess.ambient_dims[n])
        for z, e in zip(hsop.classes, hsop.degrees):
            m = n - e
            if m < 1 or ess.dim(m) == 0:
                continue
            mult = slice_g.multiplication_matrix(z, m)
            prods = (ess.basis_dense(m) @ mult.T) % 2
            acc.add_many(pack_rows(prods, ess.ambient_dims[n]))
        for row in ess.bases[n]:
            if acc.add(row):
                degrees.append(n)
                vec = unpack_rows(row.reshape(1, -1), ess.ambient_dims[n])[0]
                reps.append(slice_g.cls(n, vec))
    return degrees, reps


def freeness_verdict(ess: GradedSubspace, hsop: HsopCandidate,
                     generator_degrees: Sequence[int],
                     maxdeg: int) -> tuple[str, Optional[int]]:
    """Compare essential dimensions with a free module over k[hsop].

    Equality through degree maxdeg - max(deg zeta) gives FreeToDegree;
    a deficit is a relation (a theorem violation when the hypothesis
    holds); a surplus cannot happen with correctly computed generators.
    """
    if ess.is_zero():
        return "EssentialZero", None
    bound = maxdeg - hsop.max_degree() if hsop.degrees else maxdeg
    predicted = series_coefficients(generator_degrees, hsop.degrees, bound)
    dims = ess.dims
    for n in range(bound + 1):
        if dims[n] < predicted[n]:
            return "RelationFound", n
        if dims[n] > predicted[n]:
            raise EngineIntegrityError(
                f"essential dimension {dims[n]} exceeds the free bound "
                f"{predicted[n]} in degree {n}: generator bookkeeping bug")
    return "FreeToDegree", bound


def regular_element_check(slice_g: RingSlice, zeta: CohClass,
                          maxdeg: Optional[int] = None) -> bool:
    """Multiplication by zeta is injective in every applicable degree."""
    if maxdeg is None:
        maxdeg = slice_g.maxdeg
    e = zeta.degree
    for n in range(0, maxdeg - e + 1):
        mult = slice_g.multiplication_matrix(zeta, n)
        m = linalg.FpMatrix.from_dense(mult)
        if linalg.rank(m) != slice_g.dims[n]:
            return False
    return True


def _bigraded_components_contained(triples_by_degree, coords_by_class,
                                   degree: int, spans: dict[int, SpanAccumulator],
                                   g_dims: Sequence[int]) -> bool:
    """Check each C-side column of bigraded coordinates lies in the span.

    coords are indexed by triples (i, a, b); for each fixed (i, b) the
    vector over a must lie in spans[i] (degree-0 components must vanish:
    the unit is never essential and essential classes die on C).
    """
    triples = triples_by_degree[degree]
    for coords in coords_by_class:
        by_ib: dict[tuple[int, int], np.ndarray] = {}
        for flat in np.nonzero(coords)[0]:
            i, a, b = triples[int(flat)]
            key = (i, b)
            if key not in by_ib:
                by_ib[key] = np.zeros(g_dims[i], dtype=np.uint8)
            by_ib[key][a] = 1
        for (i, _b), vec in by_ib.items():
            if i == 0:
                return False
            span = spans.get(i)
            if span is None:
                return False
            if not span.contains(pack_rows(vec.reshape(1, -1), g_dims[i])[0]):
                return False
    return True


def subcomodule_check(mu: ComoduleMap, ess: GradedSubspace) -> bool:
    """Ess(G) is carried into Ess(G) (x) H^*(C) by the comodule map.

    Requires G to have no order-2 direct factor (otherwise some maximal
    subgroup misses C and the statement can fail); callers gate on that.
    """
    maxdeg = min(mu.maxdeg, ess.maxdeg)
    spans = {n: ess.span(n) for n in range(1, maxdeg + 1) if ess.dim(n)}
    g_dims = mu.res_g.ranks
    for n in range(1, maxdeg + 1):
        if ess.dim(n) == 0:
            continue
        coords = [(mu.matrices[n] @ e) % 2 for e in ess.basis_dense(n)]
        if not _bigraded_components_contained(mu.tensor.gen_triples, coords,
                                              n, spans, g_dims):
            return False
    return True


def kunneth_containment_check(split: KunnethSplit, ess_prod: GradedSubspace,
                              ess_h: GradedSubspace,
                              h_is_trivial: bool = False) -> bool:
    """Ess(H x C2) lands inside Ess(H) (x) H^*(C2) in Kunneth coordinates.

    For trivial H the essential ideal of the trivial group is all of
    H^*(1) = k by convention, so the containment holds outright.
    """
    if h_is_trivial:
        return True
    maxdeg = min(split.maxdeg, ess_prod.maxdeg)
    spans = {n: ess_h.span(n) for n in range(1, ess_h.maxdeg + 1) if ess_h.dim(n)}
    g_dims = split.tensor.factor_a.ranks
    for n in range(1, maxdeg + 1):
        if ess_prod.dim(n) == 0:
            continue
        coords = [(split.to_tensor[n] @ e) % 2
                  for e in ess_prod.basis_dense(n)]
        if not _bigraded_components_contained(split.tensor.gen_triples, coords,
                                              n, spans, g_dims):
            return False
    return True


def radical_restriction_check(slice_g: RingSlice, res_to_c: RingMap,
                              maxdeg: Optional[int] = None) -> bool:
    """H^*(C) is reduced, so restriction kernels are radical-closed.

    Checks: a class whose square (and iterated squares up to the degree
    bound) restricts to zero already restricts to zero.
    """
    if maxdeg is None:
        maxdeg = slice_g.maxdeg
    for n in range(1, maxdeg + 1):
        for c in slice_g.basis(n):
            if res_to_c.apply(c).is_zero():
                continue
            power = c
            while power.degree * 2 <= maxdeg:
                power = slice_g.product(power, power)
                if res_to_c.apply(power).is_zero():
                    return False
    return True

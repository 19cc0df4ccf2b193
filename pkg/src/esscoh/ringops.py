"""The cohomology ring, degreewise: classes, cup products, Hilbert series.

A degree-n class is a functional on the n-th term of the minimal
resolution, i.e. a vector over its generators (minimality makes every
cochain a cocycle with no coboundaries).  Products are computed by
lifting the right factor to a chain map and composing: the lift of
b in H^m is a sequence of kG-maps P_{m+i} -> P_i starting from b itself
read as a map to P_0 = kG, and a.b is a evaluated on the stage-deg(a)
images.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from . import linalg
from .errors import DegreeLimitError, DimensionMismatch, EngineIntegrityError
from .linalg import Gf2Solver, SpanAccumulator, block_parities, packed_zeros
from .resolution import FreeResolution, kgmap_compose


class CohClass:
    """A homogeneous cohomology class: degree plus coordinate vector."""

    __slots__ = ("degree", "vector", "resolution")

    def __init__(self, degree: int, vector, resolution: FreeResolution):
        vec = np.asarray(vector, dtype=np.uint8) % 2
        if vec.ndim != 1 or vec.shape[0] != resolution.ranks[degree]:
            raise DimensionMismatch(
                f"degree-{degree} class needs a vector of length "
                f"{resolution.ranks[degree]}")
        vec.setflags(write=False)
        self.degree = degree
        self.vector = vec
        self.resolution = resolution

    def is_zero(self) -> bool:
        return not self.vector.any()

    def __eq__(self, other):
        return (isinstance(other, CohClass)
                and self.degree == other.degree
                and self.resolution is other.resolution
                and np.array_equal(self.vector, other.vector))

    def __hash__(self):
        return hash((self.degree, self.vector.tobytes()))

    def __repr__(self):
        return f"CohClass(deg={self.degree}, {self.vector.tolist()})"


def unit_class(resolution: FreeResolution) -> CohClass:
    return CohClass(0, np.ones(1, dtype=np.uint8), resolution)


def lift_cocycle(resolution: FreeResolution, degree: int, vector: np.ndarray,
                 stages: int, solver=None) -> list[np.ndarray]:
    """Chain map stages b_i: P_{degree+i} -> P_i lifting the cocycle.

    Returns generator-image arrays for i = 0..stages.  `solver` may
    replace resolution.solver for lift-independence experiments.
    """
    if degree + stages > resolution.computed_maxdeg:
        raise DegreeLimitError(
            f"lift to stage {stages} needs resolution degree {degree + stages}")
    group = resolution.group
    order = group.order
    get_solver = solver or resolution.solver
    r0 = resolution.ranks[degree]
    base = packed_zeros(r0, order)
    for t in range(r0):
        if vector[t]:
            base[t, 0] = 1
    imgs = [base]
    ident = np.arange(order)
    for i in range(1, stages + 1):
        n = degree + i
        rhs = kgmap_compose(
            resolution.diffs[n], resolution.ranks[n - 1], group,
            imgs[i - 1], resolution.ranks[i - 1], group, ident)
        sol, ok = get_solver(i).solve_rows(rhs)
        if not ok.all():
            raise EngineIntegrityError(f"cocycle lift failed at stage {i}")
        imgs.append(sol)
    return imgs


def _pairing_matrix(resolution: FreeResolution, img: np.ndarray, i: int) -> np.ndarray:
    """Dense (ranks[degree+i], ranks[i]) matrix of block parities of stage i."""
    bs = block_parities(img, resolution.ranks[i], resolution.group.order)
    return linalg.unpack_rows(bs, resolution.ranks[i])


def cup_product(a: CohClass, b: CohClass, solver=None) -> CohClass:
    """a.b in H^{deg a + deg b}; independent per-pair chain lift."""
    if a.resolution is not b.resolution:
        raise DimensionMismatch("classes live over different resolutions")
    res = a.resolution
    n = a.degree + b.degree
    if n > res.computed_maxdeg:
        raise DegreeLimitError(
            f"product degree {n} exceeds computed degree {res.computed_maxdeg}")
    imgs = lift_cocycle(res, b.degree, b.vector, a.degree, solver=solver)
    pairing = _pairing_matrix(res, imgs[a.degree], a.degree)
    return CohClass(n, (pairing @ a.vector) % 2, res)


def reversed_solver_factory(resolution: FreeResolution):
    """Solvers preferring the opposite free variables; used to confirm
    that computed products do not depend on the chosen chain lift."""
    cache: dict[int, object] = {}

    class _RevSolver:
        def __init__(self, n: int):
            full = resolution.full_matrix(n)
            cols = resolution.module_dim(n)
            perm = np.arange(cols - 1, -1, -1)
            self._cols = cols
            self._perm = perm
            self._inner = Gf2Solver(
                linalg.permute_columns(full, cols, perm), cols)

        def solve_rows(self, rhs):
            sol, ok = self._inner.solve_rows(rhs)
            return linalg.permute_columns(sol, self._cols, self._perm), ok

        @property
        def rank(self):
            return self._inner.rank

    def get(n: int):
        if n not in cache:
            cache[n] = _RevSolver(n)
        return cache[n]

    return get


class RingSlice:
    """H^*(G) up to a degree bound: dimensions, product tables, generators.

    tables[(i, j)] is the bilinear map H^i x H^j -> H^{i+j} as a dense
    uint8 array of shape (dims[i], dims[j], dims[i+j]).  Tables for (i, j)
    and (j, i) come from independent lifts, so their agreement is a real
    commutativity check, not bookkeeping.
    """

    def __init__(self, resolution: FreeResolution, maxdeg: int,
                 tables: dict[tuple[int, int], np.ndarray],
                 generator_degrees: list[int], generators: list[CohClass]):
        self.resolution = resolution
        self.group = resolution.group
        self.maxdeg = maxdeg
        self.dims = list(resolution.ranks[: maxdeg + 1])
        self.tables = tables
        self.generator_degrees = generator_degrees
        self.generators = generators

    def basis(self, n: int) -> list[CohClass]:
        eye = np.eye(self.dims[n], dtype=np.uint8)
        return [CohClass(n, eye[k], self.resolution) for k in range(self.dims[n])]

    def cls(self, n: int, vector) -> CohClass:
        return CohClass(n, vector, self.resolution)

    def product(self, a: CohClass, b: CohClass) -> CohClass:
        i, j = a.degree, b.degree
        if i + j > self.maxdeg:
            raise DegreeLimitError(
                f"product degree {i + j} exceeds ring slice bound {self.maxdeg}")
        table = self.tables[(i, j)]
        out = np.einsum("i,j,ijk->k", a.vector, b.vector, table) % 2
        return CohClass(i + j, out.astype(np.uint8), self.resolution)

    def multiplication_matrix(self, z: CohClass, n: int) -> np.ndarray:
        """Dense matrix of (z . -): H^n -> H^{n + deg z}."""
        table = self.tables[(z.degree, n)]
        return np.einsum("i,ijk->kj", z.vector, table) % 2


def ring_slice(resolution: FreeResolution, maxdeg: Optional[int] = None) -> RingSlice:
    """Compute dimensions, all product tables, and a minimal generating set."""
    if maxdeg is None:
        maxdeg = resolution.computed_maxdeg
    if maxdeg > resolution.computed_maxdeg:
        raise DegreeLimitError("ring slice deeper than the resolution")
    dims = resolution.ranks
    tables: dict[tuple[int, int], np.ndarray] = {}
    for i in range(maxdeg + 1):
        for j in range(maxdeg + 1 - i):
            tables[(i, j)] = np.zeros((dims[i], dims[j], dims[i + j]),
                                      dtype=np.uint8)
    # Right multiplication by the unit is the identity (the ring is unital);
    # the (0, j) tables come out of the stage-0 lifts below and the unit law
    # is cross-checked against per-pair lifts in the test suite.
    for i in range(maxdeg + 1):
        idx = np.arange(dims[i])
        tables[(i, 0)][idx, 0, idx] = 1
    for j in range(1, maxdeg + 1):
        for s in range(dims[j]):
            vec = np.zeros(dims[j], dtype=np.uint8)
            vec[s] = 1
            imgs = lift_cocycle(resolution, j, vec, maxdeg - j)
            for i in range(0, maxdeg - j + 1):
                pairing = _pairing_matrix(resolution, imgs[i], i)
                # (a . e_s) coordinates: pairing[t, a-index]
                tables[(i, j)][:, s, :] = pairing.T
    generator_degrees: list[int] = []
    generators: list[CohClass] = []
    for n in range(1, maxdeg + 1):
        if dims[n] == 0:
            continue
        acc = SpanAccumulator(dims[n])
        for i in range(1, n):
            t = tables[(i, n - i)].reshape(-1, dims[n])
            acc.add_many(linalg.pack_rows(t, dims[n]))
        eye = np.eye(dims[n], dtype=np.uint8)
        for k in range(dims[n]):
            if acc.add(linalg.pack_rows(eye[k].reshape(1, -1), dims[n])[0]):
                generator_degrees.append(n)
                generators.append(CohClass(n, eye[k], resolution))
    return RingSlice(resolution, maxdeg, tables, generator_degrees, generators)


def series_coefficients(numerator_degrees: Sequence[int],
                        denominator_degrees: Sequence[int],
                        upto: int) -> list[int]:
    """Coefficients of (sum_j t^e_j) / prod_i (1 - t^d_i) through degree upto."""
    coeffs = [0] * (upto + 1)
    for e in numerator_degrees:
        if 0 <= e <= upto:
            coeffs[e] += 1
    for d in denominator_degrees:
        if d <= 0:
            raise ValueError("denominator degrees must be positive")
        for n in range(d, upto + 1):
            coeffs[n] += coeffs[n - d]
    return coeffs


def hilbert_check(dims: Sequence[int], numerator_degrees: Sequence[int],
                  denominator_degrees: Sequence[int]) -> bool:
    """Degreewise comparison of dims (indexed from 0) with the power series."""
    upto = len(dims) - 1
    if upto < 0:
        return True
    coeffs = series_coefficients(numerator_degrees, denominator_degrees, upto)
    return list(dims) == coeffs

"""Finite 2-groups as explicit multiplication tables.

Groups live entirely as validated order x order tables (index 0 is the
identity), which keeps everything exact and brute-forceable at the
orders this engine targets (<= 64).  Subgroup machinery, the centre and
its largest elementary abelian subgroup, maximal subgroups via the
Frattini quotient, direct products and direct-factor detection all work
directly on the table.
"""

from __future__ import annotations

import json
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from . import linalg
from .errors import GroupValidationError, HomomorphismError


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


class GroupTable:
    """A finite 2-group given by its full multiplication table.

    Immutable after validation; table[a][b] is the index of a*b and
    index 0 is the identity.
    """

    __slots__ = ("name", "p", "order", "table", "inv", "generators",
                 "left_embedding", "right_embedding")

    def __init__(self, table, name: str = "G", p: int = 2, validate: bool = True):
        tab = np.asarray(table, dtype=np.int32)
        if tab.ndim != 2 or tab.shape[0] != tab.shape[1]:
            raise GroupValidationError("table must be square")
        self.name = name
        self.p = p
        self.order = int(tab.shape[0])
        tab.setflags(write=False)
        self.table = tab
        if validate:
            self._validate()
        inv = np.empty(self.order, dtype=np.int32)
        for g in range(self.order):
            hits = np.nonzero(tab[g] == 0)[0]
            if hits.size != 1:
                raise GroupValidationError("inverses: row %d has no unique inverse" % g)
            inv[g] = hits[0]
        inv.setflags(write=False)
        self.inv = inv
        self.generators = self._greedy_generators()
        self.left_embedding = None
        self.right_embedding = None

    def _validate(self) -> None:
        n = self.order
        t = self.table
        if self.p != 2:
            raise GroupValidationError("p=%r unsupported; this version handles p=2" % (self.p,))
        if not _is_power_of_two(n):
            raise GroupValidationError("order %d is not a power of 2" % n)
        if t.min() < 0 or t.max() >= n:
            raise GroupValidationError("table entries out of range")
        if not (np.array_equal(t[0], np.arange(n)) and np.array_equal(t[:, 0], np.arange(n))):
            raise GroupValidationError("identity: index 0 must be a two-sided identity")
        for g in range(n):
            if len(set(t[g].tolist())) != n:
                raise GroupValidationError("latin square: row %d repeats an element" % g)
            if len(set(t[:, g].tolist())) != n:
                raise GroupValidationError("latin square: column %d repeats an element" % g)
        left = t[t, :]
        right = np.take(t, t, axis=1)
        if not np.array_equal(left, right.transpose(0, 1, 2)):
            bad = np.argwhere(left != right)
            a, b, c = (int(x) for x in bad[0])
            raise GroupValidationError(
                "associativity fails at (%d,%d,%d)" % (a, b, c))

    def _greedy_generators(self) -> tuple[int, ...]:
        gens: list[int] = []
        closed = {0}
        for g in range(1, self.order):
            if g not in closed:
                gens.append(g)
                closed = set(subgroup_closure(self.table, gens))
                if len(closed) == self.order:
                    break
        return tuple(gens)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != 0:
            x = int(self.table[x, g])
            k += 1
        return k

    def table_bytes(self) -> bytes:
        return self.table.tobytes()

    def with_name(self, name: str) -> "GroupTable":
        g = GroupTable(self.table, name=name, p=self.p, validate=False)
        g.left_embedding = self.left_embedding
        g.right_embedding = self.right_embedding
        return g

    def __repr__(self):
        return f"GroupTable({self.name}, order={self.order})"


class Subgroup:
    """A subgroup of a parent GroupTable, as a sorted element list."""

    __slots__ = ("parent", "elements", "_index_of")

    def __init__(self, parent: GroupTable, elements: Iterable[int], check: bool = True):
        elems = tuple(sorted(set(int(e) for e in elements)))
        self.parent = parent
        self.elements = elems
        self._index_of = {e: i for i, e in enumerate(elems)}
        if check:
            if not elems or elems[0] != 0:
                raise GroupValidationError("subgroup must contain the identity")
            if parent.order % len(elems) != 0:
                raise GroupValidationError("subgroup order must divide group order")
            t = parent.table
            for a in elems:
                for b in elems:
                    if int(t[a, b]) not in self._index_of:
                        raise GroupValidationError(
                            "subgroup not closed: %d * %d" % (a, b))

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    def contains(self, g: int) -> bool:
        return g in self._index_of

    def local_index(self, g: int) -> int:
        return self._index_of[g]

    def as_group_table(self, name: Optional[str] = None) -> GroupTable:
        """The subgroup as an abstract group on reindexed elements.

        Element i of the result is self.elements[i]; index 0 stays the
        identity because elements are sorted and 0 is always a member.
        """
        n = len(self.elements)
        tab = np.empty((n, n), dtype=np.int32)
        t = self.parent.table
        for i, a in enumerate(self.elements):
            for j, b in enumerate(self.elements):
                tab[i, j] = self._index_of[int(t[a, b])]
        if name is None:
            name = f"{self.parent.name}/sub{n}"
        return GroupTable(tab, name=name, p=self.parent.p, validate=False)

    def inclusion_map(self) -> np.ndarray:
        """Abstract-index -> parent-index array (a verified embedding)."""
        return np.asarray(self.elements, dtype=np.int32)

    def __eq__(self, other):
        return (isinstance(other, Subgroup) and other.parent is self.parent
                and other.elements == self.elements)

    def __hash__(self):
        return hash((id(self.parent), self.elements))

    def __repr__(self):
        return f"Subgroup(order={self.order} of {self.parent.name})"


def subgroup_closure(table: np.ndarray, seed: Sequence[int]) -> tuple[int, ...]:
    """Smallest subgroup (as sorted element tuple) containing the seed."""
    elems = {0}
    frontier = [0]
    seed = [int(s) for s in seed]
    for s in seed:
        if s not in elems:
            elems.add(s)
            frontier.append(s)
    while frontier:
        new = []
        for a in frontier:
            for b in list(elems):
                for c in (int(table[a, b]), int(table[b, a])):
                    if c not in elems:
                        elems.add(c)
                        new.append(c)
        frontier = new
    return tuple(sorted(elems))


def check_homomorphism(phi: np.ndarray, src: GroupTable, tgt: GroupTable) -> np.ndarray:
    """Validate phi: src -> tgt (an index array); returns it as int32."""
    phi = np.asarray(phi, dtype=np.int32)
    if phi.shape != (src.order,):
        raise HomomorphismError("map has wrong length")
    if phi.min() < 0 or phi.max() >= tgt.order:
        raise HomomorphismError("map image out of range")
    if phi[0] != 0:
        raise HomomorphismError("map does not send identity to identity")
    lhs = phi[src.table]
    rhs = tgt.table[phi[:, None], phi[None, :]]
    if not np.array_equal(lhs, rhs):
        a, b = (int(x) for x in np.argwhere(lhs != rhs)[0])
        raise HomomorphismError("not a homomorphism at (%d,%d)" % (a, b))
    return phi


def load_group(spec: dict) -> GroupTable:
    """Build a validated GroupTable from a parsed group description.

    Accepts {"name", "p", "table"} or {"name", "p", "degree",
    "generators"} with generators as one-line permutations.
    """
    if not isinstance(spec, dict):
        raise GroupValidationError("group spec must be an object")
    name = spec.get("name", "G")
    p = spec.get("p", 2)
    if "table" in spec:
        return GroupTable(spec["table"], name=name, p=p)
    if "generators" in spec:
        degree = spec.get("degree")
        if degree is None:
            raise GroupValidationError("permutation spec needs a degree")
        perms = []
        for g in spec["generators"]:
            t = tuple(int(x) for x in g)
            if sorted(t) != list(range(degree)):
                raise GroupValidationError(
                    "generator %r is not a permutation of 0..%d" % (g, degree - 1))
            perms.append(t)
        return _close_permutations(perms, degree, name=name, p=p)
    raise GroupValidationError("group spec needs 'table' or 'generators'")


def load_group_file(path) -> GroupTable:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GroupValidationError(f"unreadable group file: {exc}") from exc
    return load_group(spec)


def _close_permutations(perms: list[tuple[int, ...]], degree: int,
                        name: str, p: int) -> GroupTable:
    ident = tuple(range(degree))
    elems = [ident]
    seen = {ident: 0}
    frontier = [ident]
    while frontier:
        new = []
        for a in frontier:
            for g in perms:
                c = tuple(g[a[i]] for i in range(degree))
                if c not in seen:
                    seen[c] = len(elems)
                    elems.append(c)
                    new.append(c)
                c = tuple(a[g[i]] for i in range(degree))
                if c not in seen:
                    seen[c] = len(elems)
                    elems.append(c)
                    new.append(c)
        frontier = new
        if len(elems) > 4096:
            raise GroupValidationError("generated group is too large")
    n = len(elems)
    tab = np.empty((n, n), dtype=np.int32)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            tab[i, j] = seen[tuple(a[b[k]] for k in range(degree))]
    return GroupTable(tab, name=name, p=p)


def centre(g: GroupTable) -> Subgroup:
    """Elements commuting with everything."""
    t = g.table
    central = [z for z in range(g.order) if np.array_equal(t[z], t[:, z])]
    return Subgroup(g, central, check=False)


def omega1_centre(g: GroupTable) -> Subgroup:
    """Largest central elementary abelian subgroup: central z with z^2 = 1."""
    z = centre(g)
    elems = [e for e in z.elements if int(g.table[e, e]) == 0]
    return Subgroup(g, elems, check=False)


def elementary_rank(h: Subgroup) -> int:
    """Rank of an elementary abelian subgroup (log2 of its order)."""
    return int(len(h.elements)).bit_length() - 1


def group_homs_to_c2(g: GroupTable) -> list[np.ndarray]:
    """All nonzero homomorphisms G -> C2 as 0/1 vectors over the elements.

    These are the points of the dual of the Frattini quotient; their
    kernels are exactly the maximal subgroups.
    """
    n = g.order
    rows = []
    t = g.table
    for a in range(n):
        for b in range(a, n):
            row = np.zeros(n, dtype=np.uint8)
            row[a] ^= 1
            row[b] ^= 1
            row[int(t[a, b])] ^= 1
            if row.any():
                rows.append(row)
    if not rows:
        return [v for v in _nonzero_combinations(np.eye(n, dtype=np.uint8))]
    m = linalg.FpMatrix.from_dense(np.stack(rows))
    basis = linalg.kernel_basis(m).to_dense()
    return _nonzero_combinations(basis)


def _nonzero_combinations(basis: np.ndarray) -> list[np.ndarray]:
    k = basis.shape[0]
    out = []
    for mask in range(1, 1 << k):
        v = np.zeros(basis.shape[1], dtype=np.uint8)
        for i in range(k):
            if (mask >> i) & 1:
                v ^= basis[i]
        out.append(v)
    return out


def maximal_subgroups(g: GroupTable) -> list[Subgroup]:
    """All subgroups of index 2, i.e. the maximal subgroups of a 2-group."""
    if g.order == 1:
        return []
    subs = []
    seen = set()
    for hom in group_homs_to_c2(g):
        elems = tuple(int(x) for x in np.nonzero(hom == 0)[0])
        if elems not in seen:
            seen.add(elems)
            subs.append(Subgroup(g, elems, check=False))
    subs.sort(key=lambda s: s.elements)
    return subs


def frattini_subgroup(g: GroupTable) -> Subgroup:
    maxs = maximal_subgroups(g)
    if not maxs:
        return Subgroup(g, (0,), check=False)
    common = set(maxs[0].elements)
    for s in maxs[1:]:
        common &= set(s.elements)
    return Subgroup(g, sorted(common), check=False)


def all_subgroups(g: GroupTable) -> list[Subgroup]:
    """Exhaustive subgroup enumeration (brute force; fine to order 64)."""
    found = {(0,)}
    frontier = [(0,)]
    while frontier:
        new = []
        for elems in frontier:
            eset = set(elems)
            for x in range(1, g.order):
                if x not in eset:
                    t = subgroup_closure(g.table, elems + (x,))
                    if t not in found:
                        found.add(t)
                        new.append(t)
        frontier = new
    out = [Subgroup(g, e, check=False) for e in sorted(found, key=lambda e: (len(e), e))]
    return out


def proper_subgroups(g: GroupTable) -> list[Subgroup]:
    return [s for s in all_subgroups(g) if s.order < g.order]


def direct_product(a: GroupTable, b: GroupTable, name: Optional[str] = None) -> GroupTable:
    """Componentwise product; element (x, y) has index x*|b| + y.

    The canonical embeddings of the factors are attached as the
    left_embedding / right_embedding Subgroups of the result.
    """
    if a.p != b.p:
        raise GroupValidationError("factors have different primes")
    na, nb = a.order, b.order
    ia = np.repeat(np.arange(na), nb)
    ib = np.tile(np.arange(nb), na)
    tab = a.table[np.ix_(ia, ia)] * nb + b.table[np.ix_(ib, ib)]
    if name is None:
        name = f"{a.name}x{b.name}"
    prod = GroupTable(tab, name=name, p=a.p, validate=False)
    prod.left_embedding = Subgroup(prod, [i * nb for i in range(na)], check=False)
    prod.right_embedding = Subgroup(prod, list(range(nb)), check=False)
    return prod


def _rank2_central_subgroups(g: GroupTable) -> list[tuple[int, ...]]:
    omega = omega1_centre(g).elements
    out = []
    seen = set()
    for i, z1 in enumerate(omega):
        if z1 == 0:
            continue
        for z2 in omega[i + 1:]:
            z3 = int(g.table[z1, z2])
            if z3 in (0, z1, z2):
                continue
            key = tuple(sorted((0, z1, z2, z3)))
            if key not in seen:
                seen.add(key)
                out.append(key)
    return out


def has_rank2_direct_factor(g: GroupTable) -> bool:
    """True iff G decomposes as (C2 x C2) x K.

    An abelian direct factor is necessarily central, so the search runs
    over rank-2 subgroups of the centre's elementary part against
    complements of order |G|/4; exhaustive and exact.
    """
    ns = _rank2_central_subgroups(g)
    if not ns:
        return False
    if g.order == 4:
        return True
    target = g.order // 4
    candidates = [s for s in all_subgroups(g) if s.order == target]
    for nelems in ns:
        nset = set(nelems)
        for k in candidates:
            if nset.intersection(k.elements) == {0}:
                return True
    return False


def has_cp_direct_factor(g: GroupTable) -> bool:
    """True iff C2 is a direct factor of G."""
    return cp_factor_split(g) is not None


def cp_factor_split(g: GroupTable) -> Optional[tuple[int, Subgroup]]:
    """A decomposition G = K x <z> with z a central involution, if any.

    Returns (z, K) for the first candidate in scanning order, preferring
    complements K that themselves have no C2 direct factor, and among
    those, splits whose rebuilt product table equals g's table (so the
    caller can reuse g's own data).  None when no split exists.
    """
    if g.order < 2:
        return None
    omega = [z for z in omega1_centre(g).elements if z != 0]
    maxs = maximal_subgroups(g)
    candidates = []
    for z in omega:
        for k in maxs:
            if not k.contains(z):
                candidates.append((z, k))
    if not candidates:
        return None

    def quality(cand):
        z, k = cand
        ktab = k.as_group_table()
        clean = not has_cp_direct_factor(ktab) if k.order > 1 else True
        rebuilt = _rebuild_product_matches(g, k, z)
        return (0 if clean else 1, 0 if rebuilt else 1)

    candidates.sort(key=lambda c: (quality(c), c[0], c[1].elements))
    return candidates[0]


def _rebuild_product_matches(g: GroupTable, k: Subgroup, z: int) -> bool:
    if k.order * 2 != g.order:
        return False
    elems = list(k.elements)
    new_index = {}
    for i, e in enumerate(elems):
        new_index[e] = 2 * i
        new_index[int(g.table[e, z])] = 2 * i + 1
    perm = [new_index[x] for x in range(g.order)]
    return perm == list(range(g.order))


def cyclic_group(n: int, name: Optional[str] = None) -> GroupTable:
    tab = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    return GroupTable(tab, name=name or f"C{n}")


def dihedral8() -> GroupTable:
    """Dihedral group of order 8: r^4 = s^2 = 1, s r s = r^-1.

    Element r^i s^j has index 2*i + j.
    """
    tab = np.empty((8, 8), dtype=np.int32)
    for i1 in range(4):
        for j1 in range(2):
            for i2 in range(4):
                for j2 in range(2):
                    i = (i1 + (i2 if j1 == 0 else -i2)) % 4
                    j = (j1 + j2) % 2
                    tab[2 * i1 + j1, 2 * i2 + j2] = 2 * i + j
    return GroupTable(tab, name="D8")


def quaternion8() -> GroupTable:
    """Quaternion group: x^4 = 1, y^2 = x^2, y x y^-1 = x^-1.

    Element x^i y^j has index 2*i + j.
    """
    tab = np.empty((8, 8), dtype=np.int32)
    for i1 in range(4):
        for j1 in range(2):
            for i2 in range(4):
                for j2 in range(2):
                    i = (i1 + (i2 if j1 == 0 else -i2)) % 4
                    j = j1 + j2
                    if j == 2:
                        i = (i + 2) % 4
                        j = 0
                    tab[2 * i1 + j1, 2 * i2 + j2] = 2 * i + j
    return GroupTable(tab, name="Q8")


def modular16() -> GroupTable:
    """Modular (semidihedral-like) group of order 16: r^8 = s^2 = 1, s r s = r^5.

    Element r^i s^j has index 2*i + j.
    """
    tab = np.empty((16, 16), dtype=np.int32)
    for i1 in range(8):
        for j1 in range(2):
            for i2 in range(8):
                for j2 in range(2):
                    i = (i1 + i2 * (5 if j1 else 1)) % 8
                    j = (j1 + j2) % 2
                    tab[2 * i1 + j1, 2 * i2 + j2] = 2 * i + j
    return GroupTable(tab, name="M16")


def trivial_group() -> GroupTable:
    return GroupTable([[0]], name="1")


@lru_cache(maxsize=1)
def _catalog_dict() -> dict[str, GroupTable]:
    c2 = cyclic_group(2)
    c4 = cyclic_group(4)
    c8 = cyclic_group(8)
    c2_2 = direct_product(c2, c2, name="C2^2")
    c2_3 = direct_product(c2_2, c2, name="C2^3")
    entries = [
        c2,
        c4,
        c2_2,
        c8,
        direct_product(c4, c2, name="C4xC2"),
        c2_3,
        dihedral8(),
        quaternion8(),
        direct_product(c4, c4, name="C4xC4"),
        direct_product(c2_2, c4, name="C2^2xC4"),
        direct_product(dihedral8(), c2, name="D8xC2"),
        direct_product(quaternion8(), c2, name="Q8xC2"),
        modular16(),
    ]
    return {g.name: g for g in entries}


def catalog() -> dict[str, GroupTable]:
    """Built-in groups, keyed by name, in order of group order."""
    return dict(_catalog_dict())


def catalog_group(name: str) -> GroupTable:
    try:
        return _catalog_dict()[name]
    except KeyError:
        raise KeyError(f"unknown catalog group {name!r}; available: "
                       + ", ".join(_catalog_dict())) from None

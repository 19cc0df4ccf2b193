"""Per-group orchestration: resolutions, maps, essential-module verdicts.

A GroupContext lazily computes and caches everything one group needs
(resolution, ring slice, subgroup data, the comodule map, the essential
ideal and its verdict) and essential_report assembles the stable report
record.  Resolutions are shared across contexts through a registry keyed
by the multiplication table, so isomorphic-by-construction subgroups are
resolved once.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from . import essential as ess_mod
from . import grouptheory as gt
from . import induced as ind
from . import ringops as ro
from .errors import EngineIntegrityError
from .resolution import (
    DEFAULT_COLUMN_CAP,
    MinimalResolution,
    default_maxdeg,
    minimal_resolution,
)


class ResolutionRegistry:
    """Process-wide sharing of minimal resolutions, keyed by table bytes.

    With a cache_dir set, catalog-wide runs persist resolutions to disk;
    hits are revalidated on load (see the cache module).
    """

    def __init__(self, column_cap: Optional[int] = DEFAULT_COLUMN_CAP,
                 cache_dir=None):
        self.column_cap = column_cap
        self.cache_dir = cache_dir
        self._store: dict[bytes, MinimalResolution] = {}
        self._slices: dict[tuple[bytes, int], ro.RingSlice] = {}

    def get(self, group: gt.GroupTable, maxdeg: int) -> MinimalResolution:
        key = group.table_bytes()
        res = self._store.get(key)
        if res is None or (res.computed_maxdeg < maxdeg and not res.truncated):
            res = None
            if self.cache_dir is not None:
                from . import cache as cache_mod
                res = cache_mod.load_resolution(self.cache_dir, group, maxdeg,
                                                self.column_cap)
                if res is not None and (res.computed_maxdeg < maxdeg
                                        and not res.truncated):
                    res = None
            if res is None:
                res = minimal_resolution(group, maxdeg,
                                         column_cap=self.column_cap)
                if self.cache_dir is not None:
                    from . import cache as cache_mod
                    cache_mod.save_resolution(self.cache_dir, res)
            self._store[key] = res
        return res

    def get_slice(self, res: MinimalResolution, maxdeg: int) -> ro.RingSlice:
        key = (res.group.table_bytes(), maxdeg)
        sl = self._slices.get(key)
        if sl is None or sl.resolution is not res:
            sl = ro.ring_slice(res, maxdeg)
            self._slices[key] = sl
        return sl


@dataclass
class SubgroupData:
    subgroup: gt.Subgroup
    table: gt.GroupTable
    resolution: MinimalResolution
    restriction: ind.RingMap
    _transfer: Optional[ind.ModuleMap] = None
    _slice: Optional[ro.RingSlice] = None


class GroupContext:
    """Everything the pipeline knows about one group, computed lazily."""

    def __init__(self, group: gt.GroupTable, maxdeg: Optional[int] = None,
                 registry: Optional[ResolutionRegistry] = None,
                 resolution: Optional[MinimalResolution] = None,
                 hsop_degree_cap: Optional[int] = None):
        self.group = group
        self.registry = registry or ResolutionRegistry()
        self.hsop_degree_cap = hsop_degree_cap
        if maxdeg is None:
            maxdeg = default_maxdeg(group.order)
        self.requested_maxdeg = maxdeg
        if resolution is None:
            resolution = self.registry.get(group, maxdeg)
        self.resolution = resolution
        self.maxdeg = resolution.computed_maxdeg
        self._slice: Optional[ro.RingSlice] = None
        self._maximal: Optional[list[SubgroupData]] = None
        self._centre_data = None
        self._mu: Optional[ind.ComoduleMap] = None
        self._ess: Optional[ess_mod.GradedSubspace] = None
        self._ideal_i = None
        self._ideal_j = None
        self._model: Optional[ess_mod.ElementaryAbelianModel] = None
        self.timings: dict[str, float] = {}

    def _timed(self, key: str, fn):
        t0 = time.perf_counter()
        out = fn()
        self.timings[key] = self.timings.get(key, 0.0) + time.perf_counter() - t0
        return out

    @property
    def ring(self) -> ro.RingSlice:
        if self._slice is None:
            self._slice = self._timed("ring", lambda: self.registry.get_slice(
                self.resolution, self.maxdeg))
        return self._slice

    def _subgroup_data(self, sub: gt.Subgroup) -> SubgroupData:
        table = sub.as_group_table()
        res = self.registry.get(table, self.maxdeg)
        restr = ind.restriction(self.resolution, sub, res, up_to=self.maxdeg)
        return SubgroupData(sub, table, res, restr)

    @property
    def maximal(self) -> list[SubgroupData]:
        if self._maximal is None:
            self._maximal = self._timed("restrictions", lambda: [
                self._subgroup_data(s)
                for s in gt.maximal_subgroups(self.group)])
        return self._maximal

    def transfer_for(self, data: SubgroupData) -> ind.ModuleMap:
        if data._transfer is None:
            data._transfer = self._timed("transfers", lambda: ind.transfer(
                self.resolution, data.subgroup, data.resolution,
                up_to=self.maxdeg))
        return data._transfer

    def subgroup_ring(self, data: SubgroupData) -> ro.RingSlice:
        if data._slice is None:
            data._slice = self.registry.get_slice(data.resolution, self.maxdeg)
        return data._slice

    @property
    def centre_data(self):
        """(subgroup C, its resolution, restriction to C, rank d)."""
        if self._centre_data is None:
            c = gt.omega1_centre(self.group)
            d = gt.elementary_rank(c)
            table = c.as_group_table()
            res = self.registry.get(table, self.maxdeg)
            restr = ind.restriction(self.resolution, c, res, up_to=self.maxdeg)
            self._centre_data = (c, res, restr, d)
        return self._centre_data

    @property
    def centre_rank(self) -> int:
        return self.centre_data[3]

    @property
    def mu(self) -> ind.ComoduleMap:
        if self._mu is None:
            c, res_c, restr, _ = self.centre_data
            self._mu = self._timed("comodule", lambda: ind.comodule_map(
                self.resolution, c, res_c, restr, maxdeg=self.maxdeg))
        return self._mu

    @property
    def ess(self) -> ess_mod.GradedSubspace:
        if self._ess is None:
            self._ess = self._timed("essential", lambda: ess_mod.essential_ideal(
                self.resolution, [d.restriction for d in self.maximal],
                self.maxdeg))
        return self._ess

    @property
    def ideal_i(self) -> ess_mod.GradedSubspace:
        if self._ideal_i is None:
            _, _, restr, _ = self.centre_data
            self._ideal_i = ess_mod.restriction_kernel_ideal(
                self.resolution, restr, self.maxdeg)
        return self._ideal_i

    @property
    def ideal_j(self) -> ess_mod.GradedSubspace:
        if self._ideal_j is None:
            transfers = [self.transfer_for(d) for d in self.maximal]
            self._ideal_j = self._timed("transfer_ideal", lambda:
                ess_mod.transfer_ideal(self.ring, transfers, self.maxdeg))
        return self._ideal_j

    @property
    def centre_model(self) -> ess_mod.ElementaryAbelianModel:
        if self._model is None:
            _, res_c, _, d = self.centre_data
            slice_c = ro.ring_slice(res_c, res_c.computed_maxdeg)
            self._model = ess_mod.ElementaryAbelianModel(slice_c, d)
        return self._model

    def find_hsop(self) -> Optional[ess_mod.HsopCandidate]:
        _, _, restr, d = self.centre_data
        return self._timed("hsop", lambda: ess_mod.find_hsop(
            self.ring, restr, self.centre_model, d,
            degree_cap=self.hsop_degree_cap))


@dataclass
class EssentialReport:
    """The full verdict record for one group."""

    group: str
    p: int
    maxdeg: int
    d: int
    hypothesis_excluded: bool
    ess_dims: list[int]
    hsop_degrees: list[int]
    generator_degrees: list[int]
    verdict: str
    verdict_degree: Optional[int]
    hilbert_ok: bool
    checks: dict
    theorem_violation: bool
    timings: dict = field(default_factory=dict)
    truncated: bool = False

    SCHEMA = 1

    def to_json_dict(self) -> dict:
        return {
            "schema": self.SCHEMA,
            "group": self.group,
            "p": self.p,
            "maxdeg": self.maxdeg,
            "d": self.d,
            "hypothesis_excluded": self.hypothesis_excluded,
            "ess_dims": list(self.ess_dims),
            "hsop_degrees": list(self.hsop_degrees),
            "generator_degrees": list(self.generator_degrees),
            "verdict": self.verdict,
            "verdict_degree": self.verdict_degree,
            "hilbert_ok": self.hilbert_ok,
            "checks": dict(self.checks),
            "theorem_violation": self.theorem_violation,
        }

    def to_text(self) -> str:
        lines = [
            f"group {self.group} (p={self.p}, maxdeg {self.maxdeg})",
            f"  centre rank d = {self.d}; hypothesis excluded: {self.hypothesis_excluded}",
            f"  essential dims: {self.ess_dims}",
            f"  hsop degrees: {self.hsop_degrees}; generators: {self.generator_degrees}",
            f"  verdict: {self.verdict}"
            + (f"({self.verdict_degree})" if self.verdict_degree is not None else ""),
            f"  hilbert series check: {self.hilbert_ok}",
            f"  checks: {self.checks}",
        ]
        if self.theorem_violation:
            lines.append("  *** THEOREM VIOLATION ***")
        return "\n".join(lines)


def _trivial_report(group: gt.GroupTable, maxdeg: int) -> EssentialReport:
    # By convention Ess(1) = k = H^*(1), concentrated in degree 0.
    dims = [1] + [0] * maxdeg
    checks = {"counit": True, "annihilation": True, "subcomodule": True,
              "kunneth_containment": "n/a", "regularity": True}
    return EssentialReport(
        group=group.name, p=group.p, maxdeg=maxdeg, d=0,
        hypothesis_excluded=False, ess_dims=dims, hsop_degrees=[],
        generator_degrees=[], verdict="TrivialGroup", verdict_degree=None,
        hilbert_ok=True, checks=checks, theorem_violation=False)


def _kunneth_containment(ctx: GroupContext) -> object:
    """Run the product-branch containment; "n/a" when no clean split exists."""
    split = gt.cp_factor_split(ctx.group)
    if split is None:
        return "n/a"
    z, k = split
    h_table = k.as_group_table(name=f"{ctx.group.name}-factor")
    if k.order > 1 and gt.has_cp_direct_factor(h_table):
        return "n/a"
    if k.order == 1:
        return True
    c2 = gt.cyclic_group(2)
    product = gt.direct_product(h_table, c2)
    if product.table_bytes() == ctx.group.table_bytes():
        prod_ctx = ctx
    else:
        prod_ctx = GroupContext(product, maxdeg=ctx.maxdeg,
                                registry=ctx.registry)
    h_ctx = GroupContext(h_table, maxdeg=ctx.maxdeg, registry=ctx.registry)
    res_c2 = ctx.registry.get(c2, ctx.maxdeg)
    ks = ind.kunneth_split(h_ctx.resolution, res_c2, product,
                           prod_ctx.resolution,
                           maxdeg=min(ctx.maxdeg, prod_ctx.maxdeg))
    return ess_mod.kunneth_containment_check(ks, prod_ctx.ess, h_ctx.ess)


def essential_report(group: gt.GroupTable, maxdeg: Optional[int] = None,
                     registry: Optional[ResolutionRegistry] = None,
                     run_checks: bool = True) -> EssentialReport:
    """Run the full pipeline for one group and assemble the report."""
    if maxdeg is None:
        maxdeg = default_maxdeg(group.order)
    if group.order == 1:
        return _trivial_report(group, maxdeg)
    ctx = GroupContext(group, maxdeg=maxdeg, registry=registry)
    return context_report(ctx, run_checks=run_checks)


def context_report(ctx: GroupContext, run_checks: bool = True) -> EssentialReport:
    group = ctx.group
    maxdeg = ctx.maxdeg
    hypothesis_excluded = gt.has_rank2_direct_factor(group)
    d = ctx.centre_rank
    ess = ctx.ess
    ess_dims = ess.dims

    hsop = ctx.find_hsop()
    if hsop is not None and len(hsop.degrees) != d:
        raise EngineIntegrityError("hsop element count differs from centre rank")

    verdict: str
    verdict_degree: Optional[int] = None
    gen_degrees: list[int] = []
    hilbert_ok = False
    if ess.is_zero():
        verdict = "EssentialZero"
        hilbert_ok = True
    elif hsop is None:
        verdict = "HsopNotFound"
    else:
        gen_degrees, _reps = ess_mod.minimal_generators_over_hsop(
            ess, hsop, ctx.ring, maxdeg)
        verdict, verdict_degree = ess_mod.freeness_verdict(
            ess, hsop, gen_degrees, maxdeg)
        if verdict == "FreeToDegree":
            bound = verdict_degree
            hilbert_ok = ro.hilbert_check(
                ess_dims[: bound + 1], gen_degrees, hsop.degrees)
        else:
            hilbert_ok = False

    checks: dict = {}
    if run_checks:
        mu = ctx.mu
        checks["counit"] = all(
            mu.check_counit_identity(n) and mu.check_counit_restriction(n)
            for n in range(mu.maxdeg + 1))
        checks["annihilation"] = ess_mod.annihilation_check(
            ctx.ring, ctx.ideal_j, ess)
        if gt.has_cp_direct_factor(group):
            checks["subcomodule"] = "skipped"
        else:
            checks["subcomodule"] = ess_mod.subcomodule_check(mu, ess)
        checks["kunneth_containment"] = _kunneth_containment(ctx)
        if hsop is None:
            checks["regularity"] = True
        else:
            checks["regularity"] = all(
                ess_mod.regular_element_check(ctx.ring, z)
                for z in hsop.classes)

    theorem_violation = (verdict == "RelationFound"
                         and not hypothesis_excluded
                         and not ess.is_zero())
    return EssentialReport(
        group=group.name, p=group.p, maxdeg=maxdeg, d=d,
        hypothesis_excluded=hypothesis_excluded,
        ess_dims=ess_dims,
        hsop_degrees=list(hsop.degrees) if hsop else [],
        generator_degrees=gen_degrees,
        verdict=verdict, verdict_degree=verdict_degree,
        hilbert_ok=hilbert_ok, checks=checks,
        theorem_violation=theorem_violation,
        timings=dict(ctx.timings),
        truncated=ctx.resolution.truncated)

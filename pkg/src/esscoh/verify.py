"""Named invariant checks over a group pipeline.

Each check is exact algebra: no tolerances anywhere.  The CLI verify
command and the acceptance suite both run these, so a failure always
carries the group, the check name, and a short detail string.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Optional

import numpy as np

from . import essential as ess_mod
from . import grouptheory as gt
from . import induced as ind
from . import ringops as ro
from .pipeline import GroupContext, context_report
from .resolution import minimal_resolution


@dataclass
class CheckResult:
    group: str
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        status = "ok" if self.ok else "FAIL"
        tail = f" ({self.detail})" if self.detail and not self.ok else ""
        return f"{self.group:10s} {self.name:32s} {status}{tail}"


def _is_elementary_abelian(g: gt.GroupTable) -> Optional[int]:
    if any(g.table[x, x] != 0 for x in range(g.order)):
        return None
    if not np.array_equal(g.table, g.table.T):
        return None
    return g.order.bit_length() - 1


def _resolution_checks(ctx: GroupContext) -> Iterable[CheckResult]:
    res = ctx.resolution
    name = ctx.group.name
    yield CheckResult(name, "resolution.rank0", res.ranks[0] == 1)
    bad = [n for n in range(2, res.computed_maxdeg + 1) if not res.check_dd_zero(n)]
    yield CheckResult(name, "resolution.dd_zero", not bad, f"degrees {bad}")
    bad = [n for n in range(1, res.computed_maxdeg + 1)
           if not res.check_minimality(n)]
    yield CheckResult(name, "resolution.minimality", not bad, f"degrees {bad}")
    bad = [n for n in range(0, res.computed_maxdeg)
           if not res.check_exactness(n)]
    yield CheckResult(name, "resolution.exactness", not bad, f"degrees {bad}")
    r = _is_elementary_abelian(ctx.group)
    if r is not None:
        want = [comb(n + r - 1, r - 1) for n in range(res.computed_maxdeg + 1)]
        yield CheckResult(name, "resolution.binomial_ranks",
                          res.ranks == want, f"{res.ranks} != {want}")
    rerun = minimal_resolution(ctx.group, min(res.computed_maxdeg, 6),
                               column_cap=None)
    yield CheckResult(name, "resolution.deterministic_ranks",
                      rerun.ranks == res.ranks[: rerun.computed_maxdeg + 1])


def _ring_checks(ctx: GroupContext, rng: np.random.Generator,
                 spot: int) -> Iterable[CheckResult]:
    sl = ctx.ring
    name = ctx.group.name
    ok = True
    for i in range(sl.maxdeg + 1):
        d = sl.dims[i]
        ident = np.zeros((d, 1, d), dtype=np.uint8)
        ident[np.arange(d), 0, np.arange(d)] = 1
        if not (np.array_equal(sl.tables[(i, 0)], ident)
                and np.array_equal(sl.tables[(0, i)],
                                   ident.transpose(1, 0, 2))):
            ok = False
    yield CheckResult(name, "ring.unit_law", ok)
    ok = True
    bad = ""
    for (i, j), table in sl.tables.items():
        if i > j:
            continue
        other = sl.tables[(j, i)]
        if not np.array_equal(table, other.transpose(1, 0, 2)):
            ok = False
            bad = f"({i},{j})"
            break
    yield CheckResult(name, "ring.commutativity", ok, bad)
    ok = True
    for _ in range(spot):
        degs = [d for d in range(1, sl.maxdeg + 1) if sl.dims[d]]
        if len(degs) < 1:
            break
        i = int(rng.choice(degs))
        j = int(rng.choice([d for d in degs if d + i <= sl.maxdeg] or [0]))
        if j == 0:
            continue
        rem = [d for d in degs if d + i + j <= sl.maxdeg]
        if not rem:
            continue
        k = int(rng.choice(rem))
        a = sl.cls(i, rng.integers(0, 2, sl.dims[i]))
        b = sl.cls(j, rng.integers(0, 2, sl.dims[j]))
        c = sl.cls(k, rng.integers(0, 2, sl.dims[k]))
        if sl.product(sl.product(a, b), c) != sl.product(a, sl.product(b, c)):
            ok = False
            break
    yield CheckResult(name, "ring.associativity_spot", ok)
    # Products must not depend on the chain lift chosen.
    if ctx.group.order <= 8:
        rev = ro.reversed_solver_factory(ctx.resolution)
        ok = True
        for _ in range(min(spot, 20)):
            degs = [d for d in range(1, sl.maxdeg) if sl.dims[d]]
            if not degs:
                break
            i = int(rng.choice(degs))
            js = [d for d in degs if d + i <= sl.maxdeg]
            if not js:
                continue
            j = int(rng.choice(js))
            a = sl.cls(i, rng.integers(0, 2, sl.dims[i]))
            b = sl.cls(j, rng.integers(0, 2, sl.dims[j]))
            if ro.cup_product(a, b) != ro.cup_product(a, b, solver=rev):
                ok = False
                break
        yield CheckResult(name, "ring.lift_independence", ok)


def _induced_checks(ctx: GroupContext, rng: np.random.Generator,
                    pairs: int) -> Iterable[CheckResult]:
    name = ctx.group.name
    sl = ctx.ring
    mu = ctx.mu
    rng_deg = mu.maxdeg
    yield CheckResult(
        name, "comodule.counit_identity",
        all(mu.check_counit_identity(n) for n in range(rng_deg + 1)))
    yield CheckResult(
        name, "comodule.counit_restriction",
        all(mu.check_counit_restriction(n) for n in range(rng_deg + 1)))
    yield CheckResult(
        name, "comodule.split_mono",
        all(mu.check_injective(n) for n in range(rng_deg + 1)))
    # Multiplicativity of the comodule map on random pairs.
    _, res_c, _, _ = ctx.centre_data
    slice_c = ro.ring_slice(res_c, res_c.computed_maxdeg)
    ok = True
    for _ in range(min(pairs, 25)):
        degs = [d for d in range(1, rng_deg) if sl.dims[d]]
        if not degs:
            break
        i = int(rng.choice(degs))
        js = [d for d in degs if d + i <= rng_deg]
        if not js:
            continue
        j = int(rng.choice(js))
        a = sl.cls(i, rng.integers(0, 2, sl.dims[i]))
        b = sl.cls(j, rng.integers(0, 2, sl.dims[j]))
        lhs = mu.apply(sl.product(a, b))
        rhs = ind.kunneth_product(sl, slice_c, mu.tensor,
                                  mu.apply(a), i, mu.apply(b), j)
        if not np.array_equal(lhs, rhs):
            ok = False
            break
    yield CheckResult(name, "comodule.multiplicative_spot", ok)

    # Transfers: composite with restriction vanishes (full matrices), and
    # Frobenius reciprocity on seeded random pairs.
    ok_zero = True
    for data in ctx.maximal:
        tr = ctx.transfer_for(data)
        for n in range(ctx.maxdeg + 1):
            comp = (tr.matrices[n] @ data.restriction.matrices[n]) % 2
            if comp.any():
                ok_zero = False
    yield CheckResult(name, "transfer.res_composite_zero", ok_zero)
    ok_frob = True
    if ctx.maximal:
        for _ in range(pairs):
            data = ctx.maximal[int(rng.integers(0, len(ctx.maximal)))]
            tr = ctx.transfer_for(data)
            slh = ctx.subgroup_ring(data)
            i = int(rng.integers(0, ctx.maxdeg + 1))
            j = int(rng.integers(0, ctx.maxdeg + 1 - i))
            a = sl.cls(i, rng.integers(0, 2, sl.dims[i]))
            b = slh.cls(j, rng.integers(0, 2, slh.dims[j]))
            res_a = data.restriction.apply(a)
            lhs = tr.apply(slh.product(res_a, b))
            rhs = sl.product(a, tr.apply(b))
            if lhs != rhs:
                ok_frob = False
                break
    yield CheckResult(name, "transfer.frobenius", ok_frob)
    # Restriction is a ring map (random pairs, every maximal subgroup).
    ok_mult = True
    ok_unital = True
    for data in ctx.maximal:
        slh = ctx.subgroup_ring(data)
        if not np.array_equal(data.restriction.matrices[0],
                              np.eye(1, dtype=np.uint8)):
            ok_unital = False
        for _ in range(max(2, pairs // max(1, len(ctx.maximal)))):
            i = int(rng.integers(0, ctx.maxdeg + 1))
            j = int(rng.integers(0, ctx.maxdeg + 1 - i))
            a = sl.cls(i, rng.integers(0, 2, sl.dims[i]))
            b = sl.cls(j, rng.integers(0, 2, sl.dims[j]))
            lhs = data.restriction.apply(sl.product(a, b))
            rhs = slh.product(data.restriction.apply(a),
                              data.restriction.apply(b))
            if lhs != rhs:
                ok_mult = False
                break
    yield CheckResult(name, "restriction.unital", ok_unital)
    yield CheckResult(name, "restriction.multiplicative_spot", ok_mult)
    # Functoriality along one chain K <= H <= G.
    ok_fun = True
    detail = ""
    if ctx.maximal and ctx.group.order >= 4:
        data = ctx.maximal[0]
        h_table = data.table
        h_maxes = gt.maximal_subgroups(h_table)
        if h_maxes:
            k_local = h_maxes[0]
            k_elems = [data.subgroup.elements[i] for i in k_local.elements]
            k_in_g = gt.Subgroup(ctx.group, k_elems)
            k_table = k_in_g.as_group_table()
            res_k = ctx.registry.get(k_table, ctx.maxdeg)
            res_g_to_k = ind.restriction(ctx.resolution, k_in_g, res_k,
                                         up_to=ctx.maxdeg)
            # K as a subgroup of the abstract H, element order preserved.
            k_in_h = gt.Subgroup(h_table, k_local.elements)
            res_h_to_k = ind.restriction(data.resolution, k_in_h, res_k,
                                         up_to=ctx.maxdeg)
            for n in range(ctx.maxdeg + 1):
                comp = (res_h_to_k.matrices[n]
                        @ data.restriction.matrices[n]) % 2
                if not np.array_equal(comp, res_g_to_k.matrices[n]):
                    ok_fun = False
                    detail = f"degree {n}"
                    break
    yield CheckResult(name, "restriction.functorial", ok_fun, detail)


def _kunneth_checks(ctx: GroupContext) -> Iterable[CheckResult]:
    name = ctx.group.name
    g = ctx.group
    if g.left_embedding is None or g.right_embedding is None:
        return
    a_table = g.left_embedding.as_group_table()
    b_table = g.right_embedding.as_group_table()
    res_a = ctx.registry.get(a_table, ctx.maxdeg)
    res_b = ctx.registry.get(b_table, ctx.maxdeg)
    depth = min(ctx.maxdeg, res_a.computed_maxdeg, res_b.computed_maxdeg)
    split = ind.kunneth_split(res_a, res_b, g, ctx.resolution, maxdeg=depth)
    yield CheckResult(name, "kunneth.dims", split.dims_check(res_a, res_b))
    yield CheckResult(name, "kunneth.comparison_inverse", True)


def _essential_checks(ctx: GroupContext) -> Iterable[CheckResult]:
    name = ctx.group.name
    report = context_report(ctx, run_checks=True)
    checks = report.checks
    yield CheckResult(name, "essential.counit", checks["counit"] is True)
    yield CheckResult(name, "essential.annihilation",
                      checks["annihilation"] is True)
    yield CheckResult(name, "essential.subcomodule",
                      checks["subcomodule"] in (True, "skipped"),
                      str(checks["subcomodule"]))
    yield CheckResult(name, "essential.kunneth_containment",
                      checks["kunneth_containment"] in (True, "n/a"),
                      str(checks["kunneth_containment"]))
    yield CheckResult(name, "essential.regularity",
                      checks["regularity"] is True)
    yield CheckResult(name, "essential.no_violation",
                      not report.theorem_violation,
                      f"verdict {report.verdict}({report.verdict_degree})")
    if report.verdict == "FreeToDegree":
        yield CheckResult(name, "essential.hilbert_agrees", report.hilbert_ok)
    yield CheckResult(name, "essential.hsop_count",
                      len(report.hsop_degrees) in (0, report.d))
    yield CheckResult(name, "essential.j_inside_i",
                      ess_mod.containment_check(ctx.ideal_j, ctx.ideal_i))
    c_sub = ctx.centre_data[0]
    if c_sub.order < ctx.group.order:
        yield CheckResult(name, "essential.ess_inside_i",
                          ess_mod.containment_check(ctx.ess, ctx.ideal_i))
    _, _, restr, _ = ctx.centre_data
    yield CheckResult(name, "essential.restriction_radical",
                      ess_mod.radical_restriction_check(ctx.ring, restr))


def _bruteforce_subgroup_checks(ctx: GroupContext) -> Iterable[CheckResult]:
    """Maximal-subgroup reductions agree with all-proper-subgroup brute force."""
    name = ctx.group.name
    g = ctx.group
    if g.order > 8:
        return
    propers = gt.proper_subgroups(g)
    datas = []
    for s in propers:
        table = s.as_group_table()
        res = ctx.registry.get(table, ctx.maxdeg)
        datas.append((s, table, res,
                      ind.restriction(ctx.resolution, s, res, up_to=ctx.maxdeg)))
    ess_all = ess_mod.essential_ideal(
        ctx.resolution, [d[3] for d in datas], ctx.maxdeg)
    yield CheckResult(name, "essential.maximal_equals_all_proper",
                      ess_all.dims == ctx.ess.dims,
                      f"{ess_all.dims} != {ctx.ess.dims}")
    transfers = [ind.transfer(ctx.resolution, s, res, up_to=ctx.maxdeg)
                 for s, _t, res, _r in datas]
    j_all = ess_mod.transfer_ideal(ctx.ring, transfers, ctx.maxdeg)
    yield CheckResult(name, "transfer.maximal_equals_all_proper",
                      j_all.dims == ctx.ideal_j.dims,
                      f"{j_all.dims} != {ctx.ideal_j.dims}")
    maxes = gt.maximal_subgroups(g)
    want = sorted(s.elements for s in propers if s.index == 2)
    got = sorted(s.elements for s in maxes)
    yield CheckResult(name, "group.maximal_subgroup_oracle", want == got)


def run_group_checks(ctx: GroupContext, seed: int = 0,
                     pairs: int = 100) -> list[CheckResult]:
    """All invariant suites for one group; exact, deterministic given seed."""
    rng = np.random.default_rng(seed)
    out: list[CheckResult] = []
    out.extend(_resolution_checks(ctx))
    out.extend(_ring_checks(ctx, rng, spot=50))
    out.extend(_induced_checks(ctx, rng, pairs=pairs))
    out.extend(_kunneth_checks(ctx))
    out.extend(_essential_checks(ctx))
    out.extend(_bruteforce_subgroup_checks(ctx))
    return out

"""Acceptance suite: one test per criterion, each printing a PASS line.

Everything here is exact arithmetic; "tolerance" is equality.  The
catalog runs at its per-order degree caps (12 for order <= 8, 10 for
order 16) through a session-shared registry, so the whole suite stays
well under the ten-minute budget.
"""

import time

import numpy as np
import pytest

from esscoh import cli
from esscoh import essential as em
from esscoh import grouptheory as gt
from esscoh import induced as ind
from esscoh import ringops as ro
from esscoh.pipeline import context_report
from esscoh.resolution import minimal_resolution
from oracles import bar_cohomology_dim, bar_essential_dim

CATALOG = list(gt.catalog())
_SUITE_T0 = time.perf_counter()


@pytest.fixture(scope="module")
def reports(ctx_factory):
    out = {}
    for name in CATALOG:
        out[name] = context_report(ctx_factory(name))
    return out


def _pass(k, label):
    print(f"ACCEPTANCE {k} {label}: PASS")


def test_criterion_1_resolution_integrity(ctx_factory):
    t0 = time.perf_counter()
    for name in CATALOG:
        ctx = ctx_factory(name)
        res = ctx.resolution
        cap = 12 if ctx.group.order <= 8 else 10
        assert res.computed_maxdeg == cap, (name, res.computed_maxdeg)
        assert res.ranks[0] == 1
        for n in range(2, cap + 1):
            assert res.check_dd_zero(n), (name, n)
        for n in range(1, cap + 1):
            # Minimality == vanishing Hom differentials == dim H^n = ranks[n].
            assert res.check_minimality(n), (name, n)
        for n in range(cap):
            assert res.check_exactness(n), (name, n)
    for r in (1, 2, 3):
        name = "C2" if r == 1 else f"C2^{r}"
        ctx = ctx_factory(name)
        from math import comb
        want = [comb(n + r - 1, r - 1)
                for n in range(ctx.resolution.computed_maxdeg + 1)]
        assert ctx.resolution.ranks == want, name
    elapsed = time.perf_counter() - t0
    assert elapsed < 600, f"resolution integrity took {elapsed:.0f}s"
    _pass(1, "resolution-integrity")


def test_criterion_2_counit_identities(ctx_factory):
    for name in CATALOG:
        ctx = ctx_factory(name)
        mu = ctx.mu
        assert mu.maxdeg == ctx.maxdeg, name
        for n in range(mu.maxdeg + 1):
            assert mu.check_counit_identity(n), (name, n)
            assert mu.check_counit_restriction(n), (name, n)
            assert mu.check_injective(n), (name, n)
    _pass(2, "counit-identities")


def test_criterion_3_ideal_consequences(ctx_factory):
    for name in CATALOG:
        ctx = ctx_factory(name)
        assert em.annihilation_check(ctx.ring, ctx.ideal_j, ctx.ess), name
        assert em.containment_check(ctx.ideal_j, ctx.ideal_i), name
        hsop = ctx.find_hsop()
        if hsop is not None:
            for z in hsop.classes:
                assert em.regular_element_check(ctx.ring, z), name
        rng = np.random.default_rng(0)
        sl = ctx.ring
        for _ in range(100):
            data = ctx.maximal[int(rng.integers(0, len(ctx.maximal)))]
            tr = ctx.transfer_for(data)
            slh = ctx.subgroup_ring(data)
            i = int(rng.integers(0, ctx.maxdeg + 1))
            j = int(rng.integers(0, ctx.maxdeg + 1 - i))
            a = sl.cls(i, rng.integers(0, 2, sl.dims[i]))
            b = slh.cls(j, rng.integers(0, 2, slh.dims[j]))
            res_a = data.restriction.apply(a)
            assert tr.apply(slh.product(res_a, b)) == sl.product(a, tr.apply(b)), \
                (name, i, j)
            assert tr.apply(res_a).is_zero(), (name, i)
    _pass(3, "ideal-consequences")


def test_criterion_4_main_theorem(reports, ctx_factory):
    covered = set()
    for name, rep in reports.items():
        assert rep.verdict != "RelationFound", (name, rep.verdict_degree)
        assert not rep.theorem_violation, name
        if rep.verdict == "FreeToDegree":
            assert rep.hilbert_ok, name
        if rep.hypothesis_excluded:
            continue
        if all(d == 0 for d in rep.ess_dims):
            continue
        covered.add(name)
        ctx = ctx_factory(name)
        cap = ctx.maxdeg
        assert len(rep.hsop_degrees) == rep.d, name
        assert rep.verdict == "FreeToDegree", name
        assert rep.verdict_degree >= cap - max(rep.hsop_degrees), name
    assert {"C2", "C4", "C8", "Q8", "M16"} <= covered, covered
    _pass(4, "main-theorem-desk-scale")


def test_criterion_5_proof_branch_coverage(reports, ctx_factory, registry):
    for name, rep in reports.items():
        if gt.has_cp_direct_factor(gt.catalog_group(name)):
            assert rep.checks["subcomodule"] == "skipped", name
        else:
            assert rep.checks["subcomodule"] is True, name
    # Direct product-branch checks for H in {C4, Q8}.
    c2 = gt.cyclic_group(2)
    res_c2 = registry.get(c2, 10)
    for hname in ["C4", "Q8"]:
        h_ctx = ctx_factory(hname)
        prod_name = f"{hname}xC2"
        prod_ctx = ctx_factory(prod_name)
        depth = min(h_ctx.maxdeg, prod_ctx.maxdeg)
        split = ind.kunneth_split(h_ctx.resolution, res_c2, prod_ctx.group,
                                  prod_ctx.resolution, maxdeg=depth)
        assert em.kunneth_containment_check(split, prod_ctx.ess, h_ctx.ess), hname
        assert reports[prod_name].checks["kunneth_containment"] is True
    assert reports["C2^2"].hypothesis_excluded
    assert reports["C2^2xC4"].hypothesis_excluded
    _pass(5, "proof-branch-coverage")


def test_criterion_6_negative_control_d8(reports, ctx_factory):
    ctx = ctx_factory("D8")
    assert ctx.maxdeg >= 10
    for n in range(11):
        assert ctx.ess.dim(n) == 0, n
    assert reports["D8"].verdict == "EssentialZero"
    _pass(6, "negative-control-d8")


def test_criterion_7_oracle_equivalence():
    for name in CATALOG:
        g = gt.catalog_group(name)
        if g.order > 8:
            continue
        res = minimal_resolution(g, 3)
        table = g.table.tolist()
        for n in range(4):
            assert res.ranks[n] == bar_cohomology_dim(table, n), (name, n)
        from esscoh.pipeline import GroupContext
        ctx = GroupContext(g, maxdeg=3)
        propers = [s.elements for s in gt.proper_subgroups(g)]
        for n in range(1, 4):
            want = bar_essential_dim(table, n, propers)
            assert ctx.ess.dim(n) == want, (name, n)
    _pass(7, "oracle-equivalence")


def test_criterion_8_determinism(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.json"
        code = cli.main(["compute", "--group", "M16", "--maxdeg", "8",
                         "--out", str(path)])
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    elapsed = time.perf_counter() - _SUITE_T0
    assert elapsed < 600, f"acceptance suite took {elapsed:.0f}s"
    _pass(8, "determinism")

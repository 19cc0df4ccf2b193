import numpy as np
import pytest

from esscoh import essential as em
from esscoh import grouptheory as gt
from esscoh import ringops as ro
from esscoh.pipeline import GroupContext, context_report, essential_report
from oracles import bar_essential_dim


def test_essential_dims_c2(ctx_factory):
    ctx = ctx_factory("C2")
    assert ctx.ess.dims == [0] + [1] * ctx.maxdeg


def test_essential_dims_c4(ctx_factory):
    ctx = ctx_factory("C4")
    want = [0] + [1 if n % 2 else 0 for n in range(1, ctx.maxdeg + 1)]
    assert ctx.ess.dims == want


def test_essential_dims_d8_zero(ctx_factory):
    ctx = ctx_factory("D8")
    assert ctx.ess.dims == [0] * (ctx.maxdeg + 1)


def test_essential_dims_klein(ctx_factory):
    ctx = ctx_factory("C2^2")
    dims = ctx.ess.dims
    assert dims[:4] == [0, 0, 0, 1]
    assert dims[4] == 2 and dims[5] == 3
    assert ro.hilbert_check(dims, [3], [1, 1])


def test_essential_matches_bar_oracle_all_proper_subgroups():
    # Independent oracle: intersection over ALL proper subgroups on the
    # bar complex, degrees <= 3, |G| <= 8.
    for name in ["C2", "C4", "C2^2", "C8", "C4xC2", "D8", "Q8", "C2^3"]:
        g = gt.catalog_group(name)
        ctx = GroupContext(g, maxdeg=3)
        propers = [s.elements for s in gt.proper_subgroups(g)]
        table = g.table.tolist()
        for n in range(1, 4):
            assert ctx.ess.dim(n) == bar_essential_dim(table, n, propers), \
                (name, n)


def test_restriction_kernel_ideal_examples(ctx_factory):
    # G = C elementary abelian: restriction is the identity, kernel zero.
    ctx = ctx_factory("C2^2")
    assert ctx.ideal_i.dims == [0] * (ctx.maxdeg + 1)
    # C4: degree 1 class dies on the centre's involution, degree 2 survives.
    ctx4 = ctx_factory("C4")
    assert ctx4.ideal_i.dims[1] == 1 and ctx4.ideal_i.dims[2] == 0
    # Q8: all of H^1 restricts to zero.
    ctxq = ctx_factory("Q8")
    assert ctxq.ideal_i.dims[1] == 2


def test_transfer_ideal_c2_zero(ctx_factory):
    ctx = ctx_factory("C2")
    assert ctx.ideal_j.dims == [0] * (ctx.maxdeg + 1)


def test_j_annihilates_essential(ctx_factory):
    for name in ["C4", "Q8", "C4xC2", "M16"]:
        ctx = ctx_factory(name)
        assert em.annihilation_check(ctx.ring, ctx.ideal_j, ctx.ess), name


def test_j_contained_in_i(ctx_factory):
    for name in ["C4", "D8", "Q8", "C2^2", "M16"]:
        ctx = ctx_factory(name)
        assert em.containment_check(ctx.ideal_j, ctx.ideal_i), name


def test_essential_contained_in_i_when_c_proper(ctx_factory):
    for name in ["C4", "C8", "Q8", "M16", "D8xC2"]:
        ctx = ctx_factory(name)
        assert em.containment_check(ctx.ess, ctx.ideal_i), name


def test_monomial_model_roundtrip():
    res = GroupContext(gt.catalog_group("C2^2"), maxdeg=6)
    model = res.centre_model
    sl = res.ring
    rng = np.random.default_rng(0)
    for n in range(1, 5):
        monos, mat = model.monomial_matrix(n)
        assert len(monos) == sl.dims[n]
        vec = rng.integers(0, 2, sl.dims[n]).astype(np.uint8)
        poly = model.to_poly(sl.cls(n, vec))
        back = np.zeros(sl.dims[n], dtype=np.uint8)
        classes = model.monomial_classes(n)
        for m in poly:
            back ^= classes[m]
        assert np.array_equal(back, vec)


def test_is_hsop_single_variable():
    t_sq = frozenset({(2,)})
    assert em.is_hsop_on_restrictions([t_sq], 1)


def test_is_hsop_degenerate_pair():
    t1 = frozenset({(1, 0)})
    t1sq = frozenset({(2, 0)})
    assert not em.is_hsop_on_restrictions([t1, t1sq], 2)


def test_is_hsop_symmetric_pair():
    e1 = frozenset({(1, 0), (0, 1)})
    e2 = frozenset({(1, 1)})
    assert em.is_hsop_on_restrictions([e1, e2], 2)


def test_is_hsop_wrong_count():
    with pytest.raises(ValueError):
        em.is_hsop_on_restrictions([frozenset({(1, 0)})], 2)


def test_is_hsop_against_bruteforce_quotient():
    # Oracle: the quotient by the candidate ideal is finite iff it vanishes
    # in every degree beyond the socle bound; enumerate a window directly.
    rng = np.random.default_rng(4)
    d = 2
    for _ in range(30):
        polys = []
        for _i in range(d):
            deg = int(rng.integers(1, 4))
            monos = em.monomials_of_degree(d, deg)
            mask = rng.integers(0, 2, len(monos))
            if not mask.any():
                mask[0] = 1
            polys.append(frozenset(m for m, b in zip(monos, mask) if b))
        want = _quotient_finite(polys, d, window=10)
        assert em.is_hsop_on_restrictions(polys, d) == want, polys


def _quotient_finite(polys, d, window):
    from oracles import BitSpan
    for n in range(window, window + 1):
        monos = em.monomials_of_degree(d, n)
        index = {m: k for k, m in enumerate(monos)}
        span = BitSpan(len(monos))
        for p in polys:
            deg = sum(next(iter(p)))
            if deg > n:
                continue
            for m in em.monomials_of_degree(d, n - deg):
                vec = 0
                for term in em.poly_mul(p, frozenset([m])):
                    vec ^= 1 << index[term]
                span.add(vec)
        if span.dim < len(monos):
            return False
    return True


def test_find_hsop_degrees(ctx_factory):
    assert ctx_factory("C2").find_hsop().degrees == [1]
    assert ctx_factory("C4").find_hsop().degrees == [2]
    assert ctx_factory("Q8").find_hsop().degrees == [4]
    assert sorted(ctx_factory("C2^2").find_hsop().degrees) == [1, 1]


def test_hsop_restrictions_nonzero(ctx_factory):
    for name in ["C4", "Q8", "M16", "C4xC4"]:
        hsop = ctx_factory(name).find_hsop()
        assert hsop is not None
        assert all(p for p in hsop.restriction_polys), name


def test_minimal_generators_examples(ctx_factory):
    ctx = ctx_factory("C2")
    degs, reps = em.minimal_generators_over_hsop(
        ctx.ess, ctx.find_hsop(), ctx.ring)
    assert degs == [1]
    ctx4 = ctx_factory("C4")
    degs4, _ = em.minimal_generators_over_hsop(
        ctx4.ess, ctx4.find_hsop(), ctx4.ring)
    assert degs4 == [1]
    ctxk = ctx_factory("C2^2")
    degsk, repsk = em.minimal_generators_over_hsop(
        ctxk.ess, ctxk.find_hsop(), ctxk.ring)
    assert degsk == [3]
    assert all(not r.is_zero() for r in repsk)


def test_regular_element_checks(ctx_factory):
    ctx = ctx_factory("C4")
    z = ctx.ring.cls(2, [1])
    assert em.regular_element_check(ctx.ring, z)
    x = ctx.ring.cls(1, [1])
    assert not em.regular_element_check(ctx.ring, x)
    ctxq = ctx_factory("Q8")
    w = ctxq.find_hsop().classes[0]
    assert em.regular_element_check(ctxq.ring, w)


def test_subcomodule_examples(ctx_factory):
    for name in ["C4", "Q8", "C8", "M16", "C4xC4", "D8"]:
        ctx = ctx_factory(name)
        assert not gt.has_cp_direct_factor(ctx.group), name
        assert em.subcomodule_check(ctx.mu, ctx.ess), name


def test_radical_restriction(ctx_factory):
    for name in ["C4", "Q8", "D8"]:
        ctx = ctx_factory(name)
        _, _, restr, _ = ctx.centre_data
        assert em.radical_restriction_check(ctx.ring, restr), name


def test_report_c4(ctx_factory):
    rep = context_report(ctx_factory("C4"))
    assert rep.verdict == "FreeToDegree"
    assert rep.hsop_degrees == [2]
    assert rep.generator_degrees == [1]
    assert rep.hilbert_ok
    assert not rep.hypothesis_excluded
    assert not rep.theorem_violation
    assert rep.checks["subcomodule"] is True
    assert rep.checks["kunneth_containment"] == "n/a"


def test_report_d8_essential_zero(ctx_factory):
    rep = context_report(ctx_factory("D8"))
    assert rep.verdict == "EssentialZero"
    assert rep.ess_dims == [0] * (rep.maxdeg + 1)


def test_report_klein_excluded(ctx_factory):
    rep = context_report(ctx_factory("C2^2"))
    assert rep.hypothesis_excluded
    assert rep.verdict == "FreeToDegree"


def test_report_trivial_group():
    rep = essential_report(gt.trivial_group(), maxdeg=5)
    assert rep.verdict == "TrivialGroup"
    assert rep.ess_dims == [1, 0, 0, 0, 0, 0]


def test_kunneth_containment_c4_and_q8(ctx_factory):
    for name in ["C4xC2", "Q8xC2"]:
        rep = context_report(ctx_factory(name))
        assert rep.checks["kunneth_containment"] is True, name


def test_kunneth_containment_trivial_factor(ctx_factory):
    rep = context_report(ctx_factory("C2"))
    assert rep.checks["kunneth_containment"] is True


def test_report_json_schema(ctx_factory):
    rep = context_report(ctx_factory("Q8"))
    blob = rep.to_json_dict()
    assert blob["schema"] == 1
    expected_keys = {"schema", "group", "p", "maxdeg", "d",
                     "hypothesis_excluded", "ess_dims", "hsop_degrees",
                     "generator_degrees", "verdict", "verdict_degree",
                     "hilbert_ok", "checks", "theorem_violation"}
    assert set(blob) == expected_keys
    assert set(blob["checks"]) == {"counit", "annihilation", "subcomodule",
                                   "kunneth_containment", "regularity"}
    assert isinstance(blob["ess_dims"], list)
    assert blob["verdict"] == "FreeToDegree"
    assert blob["verdict_degree"] == rep.maxdeg - 4


def test_hsop_not_found_within_cap():
    # Q8 needs a degree-4 class; a cap of 3 must come back empty-handed,
    # reported as an outcome rather than an error.
    ctx = GroupContext(gt.catalog_group("Q8"), maxdeg=8, hsop_degree_cap=3)
    assert ctx.find_hsop() is None
    rep = context_report(ctx, run_checks=False)
    assert rep.verdict == "HsopNotFound"
    assert rep.hsop_degrees == []
    assert not rep.theorem_violation


def test_truncated_resolution_still_reports():
    from esscoh.pipeline import ResolutionRegistry
    reg = ResolutionRegistry(column_cap=200)
    ctx = GroupContext(gt.catalog_group("C2^3"), maxdeg=12, registry=reg)
    assert ctx.resolution.truncated
    assert ctx.maxdeg < 12
    rep = context_report(ctx, run_checks=False)
    assert rep.maxdeg == ctx.maxdeg
    assert rep.truncated
    assert len(rep.ess_dims) == ctx.maxdeg + 1

from math import comb

import numpy as np
import pytest

from esscoh import grouptheory as gt
from esscoh.errors import DegreeLimitError, HomomorphismError
from esscoh.resolution import (
    TensorResolution,
    lift_along_hom,
    minimal_resolution,
    restrict_to_subgroup,
)
from oracles import bar_cohomology_dim


def test_c2_ranks_all_one():
    res = minimal_resolution(gt.cyclic_group(2), 6)
    assert res.ranks == [1] * 7


def test_klein_ranks_linear():
    res = minimal_resolution(gt.catalog_group("C2^2"), 5)
    assert res.ranks == [1, 2, 3, 4, 5, 6]


def test_q8_ranks_periodic():
    res = minimal_resolution(gt.quaternion8(), 8)
    assert res.ranks == [1, 2, 2, 1, 1, 2, 2, 1, 1]


def test_elementary_abelian_binomial_ranks():
    for r in (1, 2, 3):
        g = gt.catalog_group(f"C2^{r}") if r > 1 else gt.cyclic_group(2)
        res = minimal_resolution(g, 6)
        assert res.ranks == [comb(n + r - 1, r - 1) for n in range(7)]


@pytest.mark.parametrize("name,maxdeg", [("C4", 8), ("D8", 8), ("Q8", 8),
                                         ("M16", 6), ("C4xC2", 6)])
def test_resolution_invariants(name, maxdeg):
    res = minimal_resolution(gt.catalog_group(name), maxdeg)
    assert res.ranks[0] == 1
    for n in range(2, maxdeg + 1):
        assert res.check_dd_zero(n)
    for n in range(1, maxdeg + 1):
        assert res.check_minimality(n)
    for n in range(maxdeg):
        assert res.check_exactness(n)


def test_dims_match_bar_oracle_low_degrees():
    for name in ["C2", "C4", "C2^2", "C8", "C4xC2", "C2^3", "D8", "Q8"]:
        g = gt.catalog_group(name)
        res = minimal_resolution(g, 3)
        table = g.table.tolist()
        for n in range(4):
            assert res.ranks[n] == bar_cohomology_dim(table, n), (name, n)


def test_ranks_deterministic():
    g = gt.dihedral8()
    r1 = minimal_resolution(g, 7)
    r2 = minimal_resolution(g, 7)
    assert r1.ranks == r2.ranks
    for n in range(1, 8):
        assert np.array_equal(r1.diffs[n], r2.diffs[n])


def test_column_cap_truncates_explicitly():
    res = minimal_resolution(gt.catalog_group("C2^3"), 12, column_cap=100)
    assert res.truncated
    assert res.computed_maxdeg < 12
    assert "degree bound reduced" in res.truncation_reason
    # Everything up to the reduced bound is still a valid resolution.
    for n in range(2, res.computed_maxdeg + 1):
        assert res.check_dd_zero(n)


def test_trivial_group_resolution():
    res = minimal_resolution(gt.trivial_group(), 5)
    assert res.ranks == [1, 0, 0, 0, 0, 0]


def test_restrict_to_subgroup_rank_bookkeeping():
    c4 = gt.cyclic_group(4)
    res = minimal_resolution(c4, 6)
    sub = gt.Subgroup(c4, [0, 2])
    view = restrict_to_subgroup(res, sub)
    assert view.ranks_list() == [2 * r for r in res.ranks]
    assert view.reps == (0, 1)
    triv = restrict_to_subgroup(res, gt.Subgroup(c4, [0]))
    assert triv.ranks_list() == [4 * r for r in res.ranks]


def test_restrict_d8_to_rotations():
    d8 = gt.dihedral8()
    res = minimal_resolution(d8, 4)
    rot = gt.Subgroup(d8, [0, 2, 4, 6])
    view = restrict_to_subgroup(res, rot)
    assert view.ranks_list() == [2 * r for r in res.ranks]


def test_lift_identity_is_cochain_identity():
    g = gt.cyclic_group(2)
    res = minimal_resolution(g, 5)
    lift = lift_along_hom(np.arange(2), res, res)
    for n in range(6):
        assert np.array_equal(lift.cochain_matrix(n),
                              np.eye(res.ranks[n], dtype=np.uint8))


def test_lift_inclusion_c2_in_c4_kills_degree_one():
    c4 = gt.cyclic_group(4)
    c2 = gt.cyclic_group(2)
    res4 = minimal_resolution(c4, 5)
    res2 = minimal_resolution(c2, 5)
    lift = lift_along_hom(np.array([0, 2]), res2, res4)
    assert not lift.cochain_matrix(1).any()


def test_lift_rejects_non_homomorphism():
    c4 = gt.cyclic_group(4)
    c2 = gt.cyclic_group(2)
    with pytest.raises(HomomorphismError):
        lift_along_hom(np.array([0, 1]), minimal_resolution(c2, 3),
                       minimal_resolution(c4, 3))


def test_lift_chain_squares_commute():
    d8 = gt.dihedral8()
    res = minimal_resolution(d8, 5)
    sub = gt.Subgroup(d8, [0, 2, 4, 6])
    h = sub.as_group_table()
    res_h = minimal_resolution(h, 5)
    lift = lift_along_hom(sub.inclusion_map(), res_h, res)
    from esscoh.resolution import kgmap_compose
    for n in range(1, 6):
        # f_{n-1} o D^H on generators:
        rhs = kgmap_compose(res_h.diffs[n], res_h.ranks[n - 1], h,
                            lift.imgs[n - 1], res.ranks[n - 1], d8,
                            sub.inclusion_map())
        # D^G o f_n on generators:
        lhs = kgmap_compose(lift.imgs[n], res.ranks[n], d8,
                            res.diffs[n], res.ranks[n - 1], d8,
                            np.arange(8))
        assert np.array_equal(lhs, rhs)


def test_degree_limit_errors():
    res = minimal_resolution(gt.cyclic_group(2), 3)
    with pytest.raises(DegreeLimitError):
        res.full_matrix_t(4)
    with pytest.raises(DegreeLimitError):
        res.check_exactness(3)


def test_tensor_resolution_matches_minimal_ranks():
    c2 = gt.cyclic_group(2)
    res2 = minimal_resolution(c2, 5)
    prod = gt.direct_product(c2, c2)
    tensor = TensorResolution(res2, res2, prod)
    res_min = minimal_resolution(prod, 5)
    assert tensor.ranks == res_min.ranks
    for n in range(2, 6):
        assert tensor.check_dd_zero(n)
    for n in range(1, 6):
        assert tensor.check_minimality(n)


def test_tensor_resolution_exact():
    c4 = gt.cyclic_group(4)
    c2 = gt.cyclic_group(2)
    res4 = minimal_resolution(c4, 4)
    res2 = minimal_resolution(c2, 4)
    prod = gt.direct_product(c4, c2)
    tensor = TensorResolution(res4, res2, prod)
    for n in range(0, 3):
        assert tensor.check_exactness(n)


def test_lift_insufficient_degrees():
    c2 = gt.cyclic_group(2)
    shallow = minimal_resolution(c2, 2)
    deep = minimal_resolution(c2, 5)
    with pytest.raises(DegreeLimitError):
        lift_along_hom(np.arange(2), deep, shallow, up_to=4)

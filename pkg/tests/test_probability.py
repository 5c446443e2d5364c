import math
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fbas.catalog import four_org_hierarchy_fbas, four_org_partition, four_org_symmetric_fbas, seven_node_fbas
from fbas.errors import InstanceTooLarge, InvalidDistribution, NoQuorumIntersection, PartitionInvalid
from fbas.generators import generate_symmetric
from fbas.model import general_from_masks
from fbas.nodeset import subsets
from fbas.probability import (AtMostOne, Explicit, Grouped, GroupedByzantine, Independent,
                              closed_form_hierarchy_4org, closed_form_symmetric_12_8, hierarchy_4org_from_e,
                              intact_probability_exact, intact_probability_grouped, intact_probability_incl_excl,
                              intact_probability_mc, maximal_dsets_avoiding)
from fbas.rng import make_rng, substreams

from conftest import seeds

P_INDEP = (0.2, 0.1, 0.1, 0.0)


def sym43():
    return generate_symmetric(4, 3, names="abcd")


def test_at_most_one_values():
    res = intact_probability_exact(sym43(), None, AtMostOne(0.6, (0.2, 0.1, 0.1, 0.0)))
    assert [r.p_intact for r in res] == pytest.approx([0.8, 0.9, 0.9, 1.0], abs=1e-12)
    assert [r.p_intact_given_well_behaved for r in res] == pytest.approx([1.0] * 4, abs=1e-12)


def test_independent_values():
    res = intact_probability_exact(sym43(), None, Independent(P_INDEP))
    assert [r.p_intact for r in res] == pytest.approx([0.792, 0.882, 0.882, 0.954], abs=1e-9)
    assert [r.p_intact_given_well_behaved for r in res] == pytest.approx([0.99, 0.98, 0.98, 0.954], abs=1e-9)


def test_incl_excl_matches_exact():
    f = sym43()
    dist = Independent(P_INDEP)
    assert maximal_dsets_avoiding(f, 0) == [0b0010, 0b0100, 0b1000]
    for v in range(4):
        a = intact_probability_incl_excl(f, v, dist)
        b = intact_probability_exact(f, v, dist)
        assert abs(a.p_intact - b.p_intact) <= 1e-12
    assert intact_probability_incl_excl(f, 0, Independent((0.0,) * 4)).p_intact == pytest.approx(1.0)


def test_seven_node_independent_formula():
    f = seven_node_fbas()
    p = (0.1, 0.2, 0.05, 0.3, 0.15, 0.25, 0.02)
    dist = Independent(p)
    one = intact_probability_exact(f, 0, dist)
    assert one.p_intact == pytest.approx((1 - p[0]) * (1 - p[1]) * (1 - p[2]) * (1 - p[6]), abs=1e-12)
    assert intact_probability_incl_excl(f, 0, dist).p_intact == pytest.approx(one.p_intact, abs=1e-12)
    seven = intact_probability_exact(f, 6, dist)
    assert seven.p_intact_given_well_behaved == pytest.approx(1.0, abs=1e-12)


def test_hierarchy_and_symmetric_grouped():
    orgs = tuple(m for _, m in four_org_partition())
    dist = GroupedByzantine(orgs, (0.1,) * 4, (0.01,) * 4)
    h = intact_probability_grouped(four_org_hierarchy_fbas(), 0, dist)
    s = intact_probability_grouped(four_org_symmetric_fbas(), 0, dist)
    assert round(h.p_intact, 2) == 0.65
    assert round(s.p_intact, 2) == 0.86
    assert abs(h.p_intact - closed_form_hierarchy_4org(0.1, 0.01)) <= 1e-9
    assert abs(s.p_intact - closed_form_symmetric_12_8(0.1, 0.01)) <= 1e-9
    assert abs(intact_probability_exact(four_org_hierarchy_fbas(), 0, dist).p_intact - h.p_intact) <= 1e-12


def test_closed_form_edges():
    assert closed_form_hierarchy_4org(0.0, 0.0) == pytest.approx(1.0)
    assert closed_form_symmetric_12_8(0.0, 0.0) == pytest.approx(1.0)
    assert hierarchy_4org_from_e(1.0, 0.0, 0.0) == pytest.approx(1.0)


def test_byzantine_with_zero_r_is_independent():
    orgs = tuple(m for _, m in four_org_partition())
    f = four_org_hierarchy_fbas()
    g = intact_probability_grouped(f, 0, GroupedByzantine(orgs, (0.1, 0.2, 0.05, 0.3), (0.0,) * 4))
    p = tuple(q for q, o in zip((0.1, 0.2, 0.05, 0.3), orgs) for _ in range(o.bit_count()))
    assert g.p_intact == pytest.approx(intact_probability_exact(f, 0, Independent(p)).p_intact, abs=1e-12)


def test_org_table_sums_to_one():
    orgs = tuple(m for _, m in four_org_partition())
    dist = GroupedByzantine(orgs, (0.3,) * 4, (0.2,) * 4)
    for i in range(4):
        assert sum(dist.org_table(i).values()) == pytest.approx(1.0, abs=1e-12)


def test_conditional_sentinel():
    f = sym43()
    res = intact_probability_exact(f, 0, AtMostOne(0.0, (1.0, 0.0, 0.0, 0.0)))
    assert res.p_intact == 0.0
    assert res.p_intact_given_well_behaved is None


def test_distribution_validation():
    with pytest.raises(InvalidDistribution):
        Independent((0.5, 1.5)).validate(2)
    with pytest.raises(InvalidDistribution):
        AtMostOne(0.5, (0.2, 0.2)).validate(2)
    with pytest.raises(InvalidDistribution):
        Explicit({0: 0.5}).validate(2)
    with pytest.raises(PartitionInvalid):
        GroupedByzantine((0b01,), (0.1,), (0.1,)).validate(2)
    with pytest.raises(PartitionInvalid):
        GroupedByzantine((0b011, 0b110), (0.1, 0.1), (0.1, 0.1)).validate(3)
    with pytest.raises(InvalidDistribution):
        Grouped((0b01, 0b10), ({0: 1.0, 0b10: 0.0}, {0: 1.0})).validate(2)


def test_guards_and_no_intersection():
    f = generate_symmetric(20, 15)
    with pytest.raises(InstanceTooLarge):
        intact_probability_exact(f, 0, Independent((0.1,) * 20))
    g = generate_symmetric(4, 2)
    with pytest.raises(NoQuorumIntersection):
        intact_probability_exact(g, 0, Independent((0.1,) * 4))
    with pytest.raises(NoQuorumIntersection):
        intact_probability_mc(g, 0, Independent((0.1,) * 4), 100)


def test_mc_point_mass():
    res = intact_probability_mc(sym43(), 0, Explicit({0: 1.0}), 1000, seed=3)
    assert res.p_intact == 1.0


def test_mc_within_three_sigma():
    f = sym43()
    dist = Independent(P_INDEP)
    res = intact_probability_mc(f, 0, dist, 100_000, seed=11)
    assert abs(res.p_intact - 0.792) <= 3 * res.std_error


def test_mc_deterministic_and_lane_independent():
    f = sym43()
    dist = Independent(P_INDEP)
    a = intact_probability_mc(f, None, dist, 10_000, seed=5)
    b = intact_probability_mc(f, None, dist, 10_000, seed=5, lanes=4)
    c = intact_probability_mc(f, None, dist, 10_000, seed=5)
    assert a == b == c
    d = intact_probability_mc(f, None, dist, 10_000, seed=6)
    assert a != d


def test_rng_reproducible():
    x = make_rng(42).random(5)
    y = make_rng(42).random(5)
    assert np.array_equal(x, y)
    s1 = [g.random() for g in substreams(1, 3)]
    s2 = [g.random() for g in substreams(1, 3)]
    assert s1 == s2 and len(set(s1)) == 3


def test_explicit_sampling_frequencies():
    table = {0: 0.5, 0b01: 0.2, 0b10: 0.2, 0b11: 0.1}
    draws = Explicit(table).sample(make_rng(7), 50_000)
    for b, p in table.items():
        freq = sum(1 for x in draws if x == b) / len(draws)
        assert abs(freq - p) <= 3 * math.sqrt(p * (1 - p) / len(draws))


@pytest.mark.parametrize("dist", [
    Independent((0.3, 0.2, 0.1)),
    AtMostOne(0.4, (0.3, 0.2, 0.1)),
    Grouped((0b011, 0b100), ({0: 0.6, 0b01: 0.1, 0b10: 0.1, 0b11: 0.2}, {0: 0.7, 0b100: 0.3})),
])
def test_sampling_frequencies_match_support(dist):
    draws = dist.sample(make_rng(1), 40_000)
    for b, p in dist.support():
        freq = sum(1 for x in draws if x == b) / len(draws)
        assert abs(freq - p) <= 3 * math.sqrt(p * (1 - p) / len(draws)) + 1e-12


def test_support_sums_to_one():
    orgs = tuple(m for _, m in four_org_partition())
    for dist in (Independent((0.3, 0.0, 0.5)), GroupedByzantine(orgs[:1], (0.2,), (0.1,)),
                 AtMostOne(0.4, (0.3, 0.2, 0.1))):
        assert sum(p for _, p in dist.support()) == pytest.approx(1.0, abs=1e-12)


def _composed():
    # a symmetric (4,3) core plus two followers that trust the core and themselves
    core = 0b1111
    slices = []
    for v in range(4):
        slices.append([s for s in subsets(core) if (s >> v) & 1 and s.bit_count() == 3])
    slices.append([core | (1 << 4)])
    slices.append([core | (1 << 5)])
    return general_from_masks(6, slices)


@given(st.lists(st.floats(0, 0.5), min_size=3, max_size=3), st.floats(0, 0.3))
def test_cluster_factorization(qs, r):
    f = _composed()
    orgs = (0b000011, 0b001100, 0b110000)
    dist = GroupedByzantine(orgs, tuple(qs), (r,) * 3)
    for v in range(6):
        a = intact_probability_grouped(f, v, dist).p_intact
        b = intact_probability_exact(f, v, dist).p_intact
        assert abs(a - b) <= 1e-12


@lru_cache(maxsize=None)
def _pair():
    # cached so the intact-set memo on each FBAS survives across examples
    return four_org_hierarchy_fbas(), four_org_symmetric_fbas()


@given(st.floats(0, 1), st.floats(0, 1))
def test_hierarchy_dominated_by_symmetric(q, r):
    orgs = tuple(m for _, m in four_org_partition())
    dist = GroupedByzantine(orgs, (q,) * 4, (r,) * 4)
    hier, sym = _pair()
    h = intact_probability_exact(hier, None, dist)
    s = intact_probability_exact(sym, None, dist)
    for x, y in zip(h, s):
        assert x.p_intact <= y.p_intact + 1e-12


@given(st.lists(st.floats(0, 1), min_size=4, max_size=4))
def test_conditional_bound(p):
    f = sym43()
    for r in intact_probability_exact(f, None, Independent(tuple(p))):
        if r.p_intact_given_well_behaved is None:
            assert p[r.node] == 1.0
            continue
        assert r.p_intact_given_well_behaved >= r.p_intact - 1e-12
        assert r.p_intact_given_well_behaved == pytest.approx(r.p_intact / (1 - p[r.node]), abs=1e-12)
        if p[r.node] == 0.0:
            assert r.p_intact_given_well_behaved == pytest.approx(r.p_intact, abs=1e-12)


@given(seeds)
def test_methods_agree_on_random_instances(seed):
    from conftest import FAMILIES
    from fbas.quorums import quorum_intersection
    f = FAMILIES["orgs"](seed)
    if not quorum_intersection(f).intersects or f.n > 8:
        return
    rng = make_rng(seed)
    dist = Independent(tuple(float(x) for x in rng.uniform(0, 0.4, f.n)))
    exact = intact_probability_exact(f, None, dist)
    for v in range(f.n):
        g = intact_probability_grouped(f, v, dist)
        assert abs(g.p_intact - exact[v].p_intact) <= 1e-12
        ie = intact_probability_incl_excl(f, v, dist)
        assert abs(ie.p_intact - exact[v].p_intact) <= 1e-12

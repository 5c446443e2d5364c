import itertools

import pytest
from hypothesis import given, strategies as st

from fbas.catalog import (seven_node_fbas, singleton_slices_fbas, six_org_hierarchy_fbas, whole_set_fbas)
from fbas.errors import EmptySet, PreconditionViolation
from fbas.generators import generate_symmetric
from fbas.intactness import delete_nodes
from fbas.model import make_general
from fbas.nodeset import full, subsets
from fbas.oracles import brute_min_quorums, brute_quorum_intersection, brute_quorums, to_frozen
from fbas.quorums import (contains_slice, enumerate_min_quorums, enumerate_quorums, greatest_quorum, is_quorum,
                          min_intersection_size, pick_lowest, quorum_intersection,
                          quorum_intersection_with_scc_preprocessing, traverse_quorums)

from conftest import FAMILIES, seeds


def test_seven_node_quorums():
    f = seven_node_fbas()
    qs = set(enumerate_quorums(f))
    assert qs == {f.mask("1237"), f.mask("4567"), f.mask("7"), f.all}
    assert quorum_intersection(f).intersects
    assert min_intersection_size(f) == 1
    assert list(enumerate_min_quorums(f, size_bound=None)) == [f.mask("7")]


def test_singleton_slices_every_set_is_quorum():
    f = singleton_slices_fbas(4)
    assert len(list(enumerate_quorums(f))) == 15
    res = quorum_intersection(f)
    assert not res.intersects
    q1, q2 = res.witness
    assert q1 and q2 and not q1 & q2


def test_whole_set_single_quorum():
    f = whole_set_fbas(4)
    assert list(enumerate_quorums(f)) == [f.all]
    # a single quorum has no distinct partner
    assert min_intersection_size(f) is None


def test_preconditions():
    f = seven_node_fbas()
    with pytest.raises(EmptySet):
        is_quorum(f, 0)
    with pytest.raises(PreconditionViolation):
        is_quorum(f, 1, d=1)
    with pytest.raises(PreconditionViolation):
        greatest_quorum(f, 0b1, w=0b10)
    with pytest.raises(PreconditionViolation):
        contains_slice(f, 0b10, 0)
    with pytest.raises(PreconditionViolation):
        list(traverse_quorums(f, 1, 1))


def test_greatest_quorum():
    f = seven_node_fbas()
    assert greatest_quorum(f, f.mask("12347")) == f.mask("1237")
    assert greatest_quorum(f, f.mask("123456")) == 0
    assert greatest_quorum(f, f.mask("12347"), w=f.mask("4")) == 0


def test_six_org_hierarchy():
    f = six_org_hierarchy_fbas()
    assert [len(ss) for ss in f.slices] == [2322] * 15 + [2430] * 5
    assert sum(1 for _ in enumerate_quorums(f)) == 37888
    assert min_intersection_size(f) == 4


@given(seeds)
def test_quorums_match_oracle(seed):
    for fam in FAMILIES.values():
        f = fam(seed)
        got = list(enumerate_quorums(f))
        assert len(got) == len(set(got))
        assert {to_frozen(q) for q in got} == brute_quorums(f)


@given(seeds, st.data())
def test_quorums_after_deletion_match_oracle(seed, data):
    f = FAMILIES["general"](seed)
    d = data.draw(st.integers(0, f.all))
    got = {to_frozen(q) for q in enumerate_quorums(f, d)}
    g = delete_nodes(f, d)
    keep = [v for v in range(f.n) if not (d >> v) & 1]
    ref = {frozenset(keep[i] for i in q) for q in brute_quorums(g)} if g.n else set()
    assert got == ref == brute_quorums(f, to_frozen(d))


@given(seeds)
def test_min_quorums_and_intersection_match_oracle(seed):
    for fam in FAMILIES.values():
        f = fam(seed)
        mins = brute_min_quorums(f)
        got = list(enumerate_min_quorums(f, size_bound=None))
        assert len(got) == len(set(got))
        assert {to_frozen(q) for q in got} == mins
        half = {to_frozen(q) for q in enumerate_min_quorums(f)}
        assert half == {q for q in mins if len(q) <= f.n / 2}
        expected = brute_quorum_intersection(f)
        assert quorum_intersection(f).intersects == expected
        assert quorum_intersection(f, pick=pick_lowest(f)).intersects == expected
        assert quorum_intersection_with_scc_preprocessing(f).intersects == expected


@given(seeds)
def test_witnesses_are_disjoint_quorums(seed):
    for fam in FAMILIES.values():
        f = fam(seed)
        for res in (quorum_intersection(f), quorum_intersection_with_scc_preprocessing(f)):
            if not res.intersects:
                q1, q2 = res.witness
                assert is_quorum(f, q1) and is_quorum(f, q2) and not q1 & q2


@given(seeds)
def test_quorums_closed_under_union(seed):
    f = FAMILIES["general"](seed)
    qs = set(enumerate_quorums(f))
    for a, b in itertools.combinations(qs, 2):
        assert a | b in qs


@given(seeds)
def test_greatest_quorum_is_union_of_quorums_inside(seed):
    f = FAMILIES["general"](seed)
    qs = list(enumerate_quorums(f))
    for u in subsets(f.all):
        inside = 0
        for q in qs:
            if q & ~u == 0:
                inside |= q
        assert greatest_quorum(f, u) == inside


@given(seeds)
def test_polynomial_delay(seed):
    # at most |V|+1 greatest-quorum calls between two outputs and after the last
    for fam in FAMILIES.values():
        f = fam(seed)
        stats = {}
        last = 0
        gaps = []
        for _ in enumerate_quorums(f, stats=stats):
            gaps.append(stats["greatest_quorum"] - last)
            last = stats["greatest_quorum"]
        gaps.append(stats.get("greatest_quorum", 0) - last)
        assert max(gaps) <= f.n + 1


@given(seeds)
def test_min_intersection_matches_pairs(seed):
    f = FAMILIES["general"](seed)
    qs = list(brute_quorums(f))
    pairs = [len(a & b) for a, b in itertools.combinations(qs, 2)]
    assert min_intersection_size(f) == (min(pairs) if pairs else None)


@pytest.mark.parametrize("n", range(1, 9))
def test_symmetric_quorum_law(n):
    for k in range(1, n + 1):
        f = generate_symmetric(n, k)
        qs = set(enumerate_quorums(f))
        assert qs == {q for q in subsets(full(n)) if q.bit_count() >= k}
        assert quorum_intersection(f).intersects == (2 * k > n)


def test_scc_preprocessing_cross_component_split():
    # two nodes trusting only themselves plus a third that trusts both
    f = make_general(3, [[[0]], [[1]], [[0, 1, 2]]])
    res = quorum_intersection_with_scc_preprocessing(f)
    assert not res.intersects
    assert not quorum_intersection(f).intersects


def test_early_stop_is_lazy():
    from fbas.generators import stellar_fbas
    f = stellar_fbas()
    stats = {}
    it = enumerate_quorums(f, stats=stats)
    first = next(it)
    assert first == f.all
    assert stats["greatest_quorum"] <= f.n + 1

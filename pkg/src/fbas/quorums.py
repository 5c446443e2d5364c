"""Quorum tests, enumeration and the quorum intersection check.

Every operation takes a deletion set ``d`` and answers the question for the
FBAS with ``d`` deleted, without building that FBAS. Nodes in ``free`` (used
for B-quorums) never need a slice.
"""
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from . import config
from .errors import EmptySet, PreconditionViolation, TooManyQuorums
from .model import AnyFbas
from .nodeset import NodeSet, members
from .trust import build_trust_graph, expand_mask, restrict, scc_partition

Picker = Callable[[NodeSet], int]


@dataclass(frozen=True)
class QuorumIntersectionResult:
    intersects: bool
    witness: Optional[Tuple[NodeSet, NodeSet]] = None

    def __bool__(self):
        return self.intersects


def _greatest(preds, u: NodeSet, w: NodeSet, d: NodeSet, free: NodeSet = 0) -> NodeSet:
    while True:
        x = u | d
        nxt = u
        m = u & ~free
        while m:
            low = m & -m
            m ^= low
            v = low.bit_length() - 1
            if not preds[v](x):
                if w & low:
                    return 0
                nxt ^= low
        if nxt == u:
            return u
        u = nxt


def contains_slice(f: AnyFbas, u: NodeSet, v: int, d: NodeSet = 0) -> bool:
    if not (u >> v) & 1:
        raise PreconditionViolation(f"node {v} is not in U")
    if u & d:
        raise PreconditionViolation("U and D must be disjoint")
    return bool(f.preds[v](u | d))


def is_quorum(f: AnyFbas, u: NodeSet, d: NodeSet = 0) -> bool:
    if not u:
        raise EmptySet("quorums are non-empty")
    if u & d:
        raise PreconditionViolation("U and D must be disjoint")
    preds = f.preds
    x = u | d
    return all(preds[v](x) for v in members(u))


def greatest_quorum(f: AnyFbas, u: NodeSet, w: NodeSet = 0, d: NodeSet = 0) -> NodeSet:
    """Greatest quorum ``Q`` with ``w <= Q <= u`` (0 if there is none)."""
    if w & ~u:
        raise PreconditionViolation("W must be a subset of U")
    if u & d:
        raise PreconditionViolation("U and D must be disjoint")
    return _greatest(f.preds, u, w, d)


def traverse_quorums(f: AnyFbas, u: NodeSet, r: NodeSet, d: NodeSet = 0, free: NodeSet = 0,
                     stats: Dict[str, int] = None) -> Iterator[NodeSet]:
    """All quorums ``Q`` with ``u <= Q <= u | r``, greatest first.

    A branch with greatest quorum ``Q`` splits ``Q - u`` into sub-ranges, one
    per node ``v``: keep the nodes before ``v``, drop ``v``. The greatest
    quorum of every sub-range is computed before ``Q`` is emitted, so
    climbing back out of exhausted branches costs nothing and at most
    ``|V| + 1`` greatest-quorum calls separate two outputs.
    """
    if u & r or (u | r) & d:
        raise PreconditionViolation("U, R and D must be pairwise disjoint")
    preds = f.preds

    def greatest(lo, hi):
        if stats is not None:
            stats["greatest_quorum"] = stats.get("greatest_quorum", 0) + 1
        return _greatest(preds, hi, lo, d, free)

    def rec(u, q):
        children = []
        w = q & ~u
        for v in members(q & ~u):
            lo = q & ~w
            child = greatest(lo, q & ~(1 << v))
            if child:
                children.append((lo, child))
            w &= ~(1 << v)
        yield q
        for lo, child in children:
            yield from rec(lo, child)

    def run():
        q = greatest(u, u | r)
        if q:
            yield from rec(u, q)

    return run()


def enumerate_quorums(f: AnyFbas, d: NodeSet = 0, stats: Dict[str, int] = None) -> Iterator[NodeSet]:
    return traverse_quorums(f, 0, f.all & ~d, d, stats=stats)


def contains_proper_subquorum(f: AnyFbas, u: NodeSet, d: NodeSet = 0) -> bool:
    return _has_proper_subquorum(f.preds, u, d)


def _has_proper_subquorum(preds, u, d):
    for v in members(u):
        if _greatest(preds, u & ~(1 << v), 0, d):
            return True
    return False


def pick_max_in_degree(f: AnyFbas) -> Picker:
    """Branch on the node with the largest trust-graph in-degree, lowest index on ties."""
    deg = build_trust_graph(f).in_degrees()
    order = sorted(range(f.n), key=lambda v: (-deg[v], v))

    def pick(r: NodeSet) -> int:
        for v in order:
            if (r >> v) & 1:
                return v
        raise ValueError("pick from an empty set")
    return pick


def pick_lowest(f: AnyFbas) -> Picker:
    return lambda r: (r & -r).bit_length() - 1


def enumerate_min_quorums(f: AnyFbas, d: NodeSet = 0, size_bound: Union[str, float, None] = "half",
                          pick: Picker = None) -> Iterator[NodeSet]:
    """Minimal quorums with at most half of the remaining nodes, each once.

    ``size_bound=None`` drops the size limit; a number overrides it.
    """
    preds = f.preds
    rest = f.all & ~d
    if size_bound == "half":
        size_bound = rest.bit_count() / 2
    if pick is None:
        pick = pick_max_in_degree(f)

    def rec(u, r):
        if size_bound is not None and u.bit_count() > size_bound:
            return
        q = _greatest(preds, u, 0, d)
        if q:
            if q == u and not _has_proper_subquorum(preds, u, d):
                yield u
        elif r and _greatest(preds, u | r, u, d):
            v = pick(r)
            bit = 1 << v
            yield from rec(u, r & ~bit)
            yield from rec(u | bit, r & ~bit)

    return rec(0, rest)


def quorum_intersection(f: AnyFbas, d: NodeSet = 0, pick: Picker = None) -> QuorumIntersectionResult:
    key = ("qi", d)
    if pick is None and key in f.memo:
        return f.memo[key]
    preds = f.preds
    rest = f.all & ~d
    result = QuorumIntersectionResult(True)
    for q in enumerate_min_quorums(f, d, pick=pick):
        other = _greatest(preds, rest & ~q, 0, d)
        if other:
            result = QuorumIntersectionResult(False, (q, other))
            break
    if pick is None:
        f.memo[key] = result
    return result


def quorum_intersection_with_scc_preprocessing(f: AnyFbas) -> QuorumIntersectionResult:
    part = scc_partition(build_trust_graph(f))
    if part.greatest is None:
        # distinct maximal SCCs are trust clusters, hence disjoint quorums
        a, b = part.maximal[:2]
        return QuorumIntersectionResult(False, (part.components[a], part.components[b]))
    core = part.components[part.greatest]
    for i, comp in enumerate(part.components):
        if i == part.greatest:
            continue
        q = _greatest(f.preds, comp, 0, 0)
        if q:
            return QuorumIntersectionResult(False, (q, core))
    res = quorum_intersection(restrict(f, core))
    if res.intersects:
        return res
    keep = list(members(core))
    q1, q2 = res.witness
    return QuorumIntersectionResult(False, (expand_mask(q1, keep), expand_mask(q2, keep)))


def min_intersection_size(f: AnyFbas, cap: int = None) -> Optional[int]:
    """Smallest ``|Q1 & Q2|`` over pairs of distinct quorums (None with fewer than two quorums).

    Every quorum contains a minimal quorum, so minimal quorums suffice; a
    minimal quorum other than the whole node set also pairs with that set.
    """
    if cap is None:
        cap = config.QUORUM_CAP
    mins: List[NodeSet] = []
    for q in enumerate_min_quorums(f, size_bound=None):
        mins.append(q)
        if len(mins) > cap:
            raise TooManyQuorums(f"more than {cap} minimal quorums")
    best = None
    for q in mins:
        if q != f.all:
            best = q.bit_count() if best is None else min(best, q.bit_count())
    if len(mins) > 1:
        pair = _min_pairwise(mins, f.n)
        best = pair if best is None else min(best, pair)
    return best


def _min_pairwise(sets: List[NodeSet], n: int) -> int:
    if n <= 64:
        arr = np.array(sets, dtype=np.uint64)
        best = n
        for i in range(len(arr) - 1):
            best = min(best, int(np.bitwise_count(arr[i + 1:] & arr[i]).min()))
            if best == 0:
                break
        return best
    return min((a & b).bit_count() for i, a in enumerate(sets) for b in sets[i + 1:])

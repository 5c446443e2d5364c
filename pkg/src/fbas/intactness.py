"""Deleting nodes, DSets and intact nodes.

A DSet ``D`` is a set whose removal leaves an FBAS with quorum intersection
and whose complement is a quorum (or ``D`` is everything). A node is
``B``-intact when some DSet covers ``B`` but misses the node.
"""
from dataclasses import dataclass
from typing import Callable

from . import config
from .errors import EmptySet, InstanceTooLarge, NoQuorumIntersection, PreconditionViolation, ValidationError
from .model import AnyFbas, GeneralFbas, expand_simple
from .nodeset import NodeSet, members
from .quorums import _greatest, is_quorum, quorum_intersection, traverse_quorums
from .trust import expand_mask, restrict


@dataclass(frozen=True)
class IntactnessReport:
    intact: NodeSet
    smallest_dset: NodeSet
    input_b: NodeSet


def _check_subset(f: AnyFbas, x: NodeSet, what: str):
    if x & ~f.all:
        raise ValidationError(f"{what} contains nodes outside the universe")


def delete_nodes(f: AnyFbas, d: NodeSet) -> GeneralFbas:
    """The explicit FBAS with ``d`` removed from the node set and from every slice.

    Surviving nodes keep their relative order. Deleting everything gives an
    FBAS with universe 0.
    """
    _check_subset(f, d, "D")
    if f.is_simple:
        f = expand_simple(f)
    keep = [v for v in range(f.n) if not (d >> v) & 1]
    new_index = {v: i for i, v in enumerate(keep)}

    def compress(s):
        out = 0
        for v in members(s & ~d):
            out |= 1 << new_index[v]
        return out

    slices = []
    for v in keep:
        seen = {}
        for s in f.slices[v]:
            seen.setdefault(compress(s), None)
        slices.append(tuple(seen))
    return GeneralFbas(len(keep), tuple(slices), tuple(f.names[v] for v in keep))


def is_dset(f: AnyFbas, d: NodeSet) -> bool:
    _check_subset(f, d, "D")
    if d == f.all:
        return True
    # the quorum test is cheap, so it goes first
    return is_quorum(f, f.all & ~d) and quorum_intersection(f, d).intersects


def symmetric_dsets(n: int, k: int) -> Callable[[NodeSet], bool]:
    """Closed-form DSet test for the symmetric FBAS with ``n`` nodes and threshold ``k``."""
    if not 1 <= k <= n:
        raise ValidationError(f"k={k} outside [1, {n}]")
    bound = min(n - k, 2 * k - n - 1)

    def pred(d: NodeSet) -> bool:
        c = d.bit_count()
        return c == n or (k == 1 and c == n - 1) or c <= bound
    return pred


def intact_nodes(f: AnyFbas, b: NodeSet) -> IntactnessReport:
    """All ``b``-intact nodes; their complement is the smallest DSet containing ``b``.

    Shrinks a candidate set: take its greatest quorum ``Q``, stop if deleting
    everything outside ``Q`` keeps quorum intersection, otherwise cut ``Q``
    down using the two disjoint quorums that were found.
    """
    _check_subset(f, b, "B")
    key = ("intact", b)
    if key in f.memo:
        return f.memo[key]
    if not quorum_intersection(f).intersects:
        raise NoQuorumIntersection("intact nodes are only defined for FBAS with quorum intersection")
    preds = f.preds
    u = f.all & ~b
    while True:
        q = _greatest(preds, u, 0, 0)
        res = quorum_intersection(f, f.all & ~q)
        if res.intersects:
            break
        q1, q2 = res.witness
        w1 = _greatest(preds, q & ~q1, 0, 0)
        w2 = _greatest(preds, q & ~q2, 0, 0)
        if not w1:
            u = w2
        elif not w2:
            u = w1
        else:
            u = w1 & w2
    report = IntactnessReport(q, f.all & ~q, b)
    f.memo[key] = report
    return report


def intact_in_cluster(f: AnyFbas, z: NodeSet, b: NodeSet) -> NodeSet:
    """Intact nodes of a trust cluster ``z``, computed on ``z`` alone."""
    sub = restrict(f, z)
    keep = list(members(z))
    local_b = 0
    for i, v in enumerate(keep):
        if (b >> v) & 1:
            local_b |= 1 << i
    return expand_mask(intact_nodes(sub, local_b).intact, keep)


def is_b_quorum(f: AnyFbas, b: NodeSet, q: NodeSet) -> bool:
    if not q:
        raise EmptySet("B-quorums are non-empty")
    preds = f.preds
    return all(preds[v](q) for v in members(q & ~b))


def b_quorums(f: AnyFbas, b: NodeSet, limit: int = None):
    """All ``b``-quorums, greatest first."""
    if limit is None:
        limit = config.B_INTACT_LIMIT
    if f.n > limit:
        raise InstanceTooLarge(f"B-quorum enumeration is limited to {limit} nodes")
    return traverse_quorums(f, 0, f.all, 0, free=b)


def is_b_intact_set(f: AnyFbas, b: NodeSet, u: NodeSet, limit: int = None) -> bool:
    if limit is None:
        limit = config.B_INTACT_LIMIT
    if f.n > limit:
        raise InstanceTooLarge(f"B-intact set decision is limited to {limit} nodes")
    if u & b:
        raise PreconditionViolation("a B-intact set must avoid B")
    if not u:
        return True
    if not is_b_quorum(f, b, u):
        return False
    touching = [q for q in b_quorums(f, b, limit) if q & u]
    for i, q in enumerate(touching):
        for p in touching[i + 1:]:
            if not q & p & u:
                return False
    return True


def has_subslice_property(f: AnyFbas, b: NodeSet) -> bool:
    """Whether every slice of a node outside ``b`` holds a slice of each of its members outside ``b``."""
    if f.is_simple:
        return _simple_subslice(f, b)
    preds = f.preds
    for v in members(f.all & ~b):
        for s in f.slices[v]:
            for u in members(s & ~b):
                if u != v and not preds[u](s):
                    return False
    return True


def _simple_subslice(f, b):
    # a slice of v is any n(v)-subset W of q(v) with v in W; member u needs
    # n(u) of its own q(u) inside W. The worst W packs as few of q(u) as possible.
    for v in members(f.all & ~b):
        qv, kv = f.q[v], f.thresholds[v]
        if kv < 2:
            continue
        for u in members(qv & ~b):
            if u == v:
                continue
            # W must hold v and u; fill the other kv-2 places outside q(u) first
            inside = ((1 << v) | (1 << u)) & f.q[u]
            outside_room = (qv & ~f.q[u] & ~(1 << v) & ~(1 << u)).bit_count()
            forced = max(0, kv - 2 - outside_room)
            if inside.bit_count() + forced < f.thresholds[u]:
                return False
    return True

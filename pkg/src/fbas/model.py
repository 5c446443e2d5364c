"""The two FBAS representations.

``GeneralFbas`` stores explicit quorum slices per node, ``SimpleFbas`` the
``(q(v), n(v))`` pairs. Both are immutable; node ``i`` of an FBAS with
universe ``n`` is bit ``i`` of a bitmask and ``names[i]`` is its external
name.

Every FBAS lazily compiles one predicate per node, ``preds[v](x)``, that is
true iff ``v`` has a slice contained in ``x``. Callers always pass an ``x``
that contains ``v`` (the simple-FBAS popcount test relies on that). All
quorum algorithms go through these predicates; evaluating them on
``U | D`` gives the slice test in the FBAS with ``D`` deleted
(``s - D <= U`` iff ``s <= U | D``).
"""
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import config
from .definitions import QuorumSliceDefinition, personalize
from .errors import (
    DuplicateSlice,
    EmptySliceSet,
    ExpansionTooLarge,
    MembershipViolation,
    ThresholdOutOfRange,
    UnknownNode,
    ValidationError,
)
from .nodeset import NodeSet, full, members, nodeset, size

Predicate = Callable[[NodeSet], object]


class Fbas:
    """Common surface of :class:`GeneralFbas` and :class:`SimpleFbas`."""

    n: int
    names: Tuple[str, ...]

    @property
    def all(self) -> NodeSet:
        return full(self.n)

    @cached_property
    def index(self) -> Dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def mask(self, names: Iterable[str]) -> NodeSet:
        try:
            return nodeset(self.index[x] for x in names)
        except KeyError as exc:
            raise UnknownNode(f"unknown node name {exc.args[0]!r}") from None

    def names_of(self, mask: NodeSet) -> List[str]:
        return [self.names[v] for v in members(mask)]

    @property
    def trust_out(self) -> List[NodeSet]:
        raise NotImplementedError

    @cached_property
    def preds(self) -> List[Predicate]:
        return compile_predicates(self)


@dataclass(frozen=True, eq=False)
class GeneralFbas(Fbas):
    n: int
    slices: Tuple[Tuple[NodeSet, ...], ...]
    names: Tuple[str, ...]
    # base (non-personalized) definition per node, when the slices came from one
    definitions: Optional[Tuple[Optional[QuorumSliceDefinition], ...]] = None
    memo: dict = field(default_factory=dict, repr=False)

    is_simple = False

    @cached_property
    def trust_out(self) -> List[NodeSet]:
        out = []
        for ss in self.slices:
            m = 0
            for s in ss:
                m |= s
            out.append(m)
        return out


@dataclass(frozen=True, eq=False)
class SimpleFbas(Fbas):
    n: int
    q: Tuple[NodeSet, ...]
    thresholds: Tuple[int, ...]
    names: Tuple[str, ...]
    memo: dict = field(default_factory=dict, repr=False)

    is_simple = True

    @property
    def trust_out(self) -> List[NodeSet]:
        return list(self.q)


AnyFbas = Union[GeneralFbas, SimpleFbas]


def _names(universe: int, names: Optional[Sequence[str]]) -> Tuple[str, ...]:
    if names is None:
        return tuple(str(i) for i in range(universe))
    names = tuple(str(x) for x in names)
    if len(names) != universe:
        raise ValidationError(f"{len(names)} names for {universe} nodes")
    if len(set(names)) != universe:
        raise ValidationError("node names must be unique")
    return names


def make_general(universe: int, slices: Sequence[Iterable[Iterable[int]]], names: Sequence[str] = None) -> GeneralFbas:
    """Build a general FBAS from per-node lists of slices given as node indices."""
    masks = []
    for v, ss in enumerate(slices):
        node_masks = []
        for s in ss:
            s = list(s)
            for u in s:
                if not 0 <= u < universe:
                    raise UnknownNode(f"slice of node {v} references node {u}, universe is {universe}")
            node_masks.append(nodeset(s))
        masks.append(node_masks)
    return general_from_masks(universe, masks, names)


def general_from_masks(universe: int, slices: Sequence[Iterable[NodeSet]], names: Sequence[str] = None,
                       definitions: Sequence[Optional[QuorumSliceDefinition]] = None) -> GeneralFbas:
    if universe < 1:
        raise ValidationError("an FBAS needs at least one node")
    if len(slices) != universe:
        raise ValidationError(f"{len(slices)} slice lists for {universe} nodes")
    limit = full(universe)
    out = []
    for v, ss in enumerate(slices):
        ss = tuple(ss)
        if not ss:
            raise EmptySliceSet(f"node {v} has no quorum slices")
        if len(set(ss)) != len(ss):
            raise DuplicateSlice(f"node {v} lists a slice twice")
        for s in ss:
            if s & ~limit:
                raise UnknownNode(f"slice of node {v} references a node outside the universe")
            if not (s >> v) & 1:
                raise MembershipViolation(f"node {v} is missing from one of its own slices")
        out.append(ss)
    if definitions is not None:
        definitions = tuple(definitions)
        if len(definitions) != universe:
            raise ValidationError("one definition entry per node required")
    return GeneralFbas(universe, tuple(out), _names(universe, names), definitions)


def make_simple(universe: int, q: Sequence[Iterable[int]], n: Sequence[int], names: Sequence[str] = None) -> SimpleFbas:
    qm = []
    for v, qs in enumerate(q):
        qs = list(qs)
        for u in qs:
            if not 0 <= u < universe:
                raise UnknownNode(f"q({v}) references node {u}")
        qm.append(nodeset(qs))
    return simple_from_masks(universe, qm, n, names)


def simple_from_masks(universe: int, q: Sequence[NodeSet], n: Sequence[int], names: Sequence[str] = None) -> SimpleFbas:
    if universe < 1:
        raise ValidationError("an FBAS needs at least one node")
    if len(q) != universe or len(n) != universe:
        raise ValidationError("q and n need one entry per node")
    limit = full(universe)
    for v in range(universe):
        if q[v] & ~limit:
            raise UnknownNode(f"q({v}) references a node outside the universe")
        if not (q[v] >> v) & 1:
            raise MembershipViolation(f"node {v} is not in q({v})")
        if not 1 <= n[v] <= size(q[v]):
            raise ThresholdOutOfRange(f"n({v})={n[v]} outside [1, {size(q[v])}]")
    return SimpleFbas(universe, tuple(q), tuple(int(x) for x in n), _names(universe, names))


def expand_simple(f: SimpleFbas, cap: int = None) -> GeneralFbas:
    """All ``n(v)``-subsets of ``q(v)`` containing ``v``, as explicit slices."""
    if cap is None:
        cap = config.EXPANSION_CAP
    slices = []
    for v in range(f.n):
        others = [u for u in members(f.q[v]) if u != v]
        k = f.thresholds[v] - 1
        if comb(len(others), k) > cap:
            raise ExpansionTooLarge(f"node {v} would get {comb(len(others), k)} slices")
        slices.append(tuple((1 << v) | nodeset(c) for c in combinations(others, k)))
    return GeneralFbas(f.n, tuple(slices), f.names)


def fbas_size(f: AnyFbas) -> int:
    if f.is_simple:
        return f.n + sum(size(q) for q in f.q)
    return f.n + sum(size(s) for ss in f.slices for s in ss)


def personalized_definition(f: GeneralFbas, v: int) -> Optional[QuorumSliceDefinition]:
    if f.definitions is None or f.definitions[v] is None:
        return None
    return personalize(f.definitions[v], v)


# -- slice containment predicates -------------------------------------------

def compile_predicates(f: AnyFbas, strategy: str = None) -> List[Predicate]:
    """One containment predicate per node.

    ``strategy`` is ``"simple"`` (popcount test), ``"table"`` (lookup in a
    precomputed up-closed table over all ``2^n`` subsets), ``"tree"``
    (threshold-tree evaluation of the node's definition) or ``"scan"``
    (linear scan over the minimal slices). ``None`` picks the fastest one
    that applies.
    """
    if f.is_simple:
        if strategy not in (None, "simple"):
            raise ValueError(f"strategy {strategy!r} does not apply to a simple FBAS")
        return [_simple_pred(f.q[v], f.thresholds[v]) for v in range(f.n)]
    preds = []
    for v in range(f.n):
        s = strategy
        if s is None:
            if f.n <= config.TABLE_LIMIT:
                s = "table"
            elif personalized_definition(f, v) is not None:
                s = "tree"
            else:
                s = "scan"
        if s == "table":
            preds.append(_table_pred(f.n, f.slices[v]))
        elif s == "tree":
            d = personalized_definition(f, v)
            if d is None:
                raise ValueError(f"node {v} has no slice definition")
            preds.append(d.is_satisfied_by)
        elif s == "scan":
            preds.append(_scan_pred(f.slices[v]))
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
    return preds


def _simple_pred(q: NodeSet, k: int) -> Predicate:
    def pred(x):
        return (x & q).bit_count() >= k
    return pred


def minimal_slices(ss: Iterable[NodeSet]) -> List[NodeSet]:
    """Drop every slice that is a proper superset of another one."""
    ordered = sorted(set(ss), key=lambda s: (s.bit_count(), s))
    keep: List[NodeSet] = []
    for s in ordered:
        if not any(m & ~s == 0 for m in keep):
            keep.append(s)
    return keep


def _scan_pred(ss: Iterable[NodeSet]) -> Predicate:
    mins = tuple(minimal_slices(ss))

    def pred(x):
        nx = ~x
        for s in mins:
            if not s & nx:
                return True
        return False
    return pred


def containment_table(n: int, ss: Iterable[NodeSet]) -> bytes:
    """Byte ``x`` is 1 iff some slice is a subset of ``x``."""
    table = np.zeros(1 << n, dtype=np.uint8)
    table[np.fromiter(ss, dtype=np.int64)] = 1
    for i in range(n):
        view = table.reshape(-1, 2, 1 << i)
        view[:, 1, :] |= view[:, 0, :]
    return table.tobytes()


def _table_pred(n: int, ss: Iterable[NodeSet]) -> Predicate:
    return containment_table(n, ss).__getitem__

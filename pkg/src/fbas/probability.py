"""Probability that a node is intact when the ill-behaved set is random.

A distribution over ill-behaved sets ``B`` is one of :class:`AtMostOne`,
:class:`Independent`, :class:`Grouped`, :class:`GroupedByzantine` or
:class:`Explicit`. The exact routines sum ``p(B)`` over every ``B`` for
which the node is ``B``-intact; the Monte Carlo routine samples ``B``.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from math import prod, sqrt
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import config
from .errors import InstanceTooLarge, InvalidDistribution, PartitionInvalid, TooManyMaximalDsets
from .intactness import intact_nodes
from .model import AnyFbas
from .nodeset import NodeSet, full, members
from .quorums import quorum_intersection, traverse_quorums
from .rng import substreams
from .trust import build_trust_graph, restrict

TOL = 1e-12
MC_BLOCK = 4096


def _check_prob(x: float, what: str):
    if not 0.0 <= x <= 1.0:
        raise InvalidDistribution(f"{what}={x} is not a probability")


def _check_total(total: float, what: str):
    if abs(total - 1.0) > TOL:
        raise InvalidDistribution(f"{what} sums to {total!r}, not 1")


def _masks_from_bits(bits: np.ndarray) -> List[int]:
    """Rows of a boolean matrix as node-set bitmasks."""
    n = bits.shape[1]
    if n <= 62:
        weights = np.left_shift(np.int64(1), np.arange(n, dtype=np.int64))
        return (bits.astype(np.int64) @ weights).tolist()
    return [sum(1 << int(i) for i in np.flatnonzero(row)) for row in bits]


def _compress(mask: NodeSet, keep: Sequence[int]) -> NodeSet:
    out = 0
    for i, v in enumerate(keep):
        if (mask >> v) & 1:
            out |= 1 << i
    return out


@dataclass(frozen=True)
class AtMostOne:
    """``B`` is empty with ``p_empty``, otherwise the single node ``v`` with ``p_single[v]``."""

    p_empty: float
    p_single: Tuple[float, ...]

    def validate(self, n: int):
        if len(self.p_single) != n:
            raise InvalidDistribution(f"{len(self.p_single)} singleton probabilities for {n} nodes")
        _check_prob(self.p_empty, "p_empty")
        for v, x in enumerate(self.p_single):
            _check_prob(x, f"p_single[{v}]")
        _check_total(self.p_empty + sum(self.p_single), "p_empty + p_single")

    def ill_probability(self, v: int) -> float:
        return self.p_single[v]

    def support_size(self) -> int:
        return 1 + len(self.p_single)

    def support(self) -> Iterator[Tuple[NodeSet, float]]:
        if self.p_empty > 0:
            yield 0, self.p_empty
        for v, x in enumerate(self.p_single):
            if x > 0:
                yield 1 << v, x

    def marginal(self, keep: Sequence[int]) -> "Explicit":
        table: Dict[NodeSet, float] = {}
        for b, x in self.support():
            key = _compress(b, keep)
            table[key] = table.get(key, 0.0) + x
        return Explicit(table)

    def sample(self, rng: np.random.Generator, size: int) -> List[NodeSet]:
        probs = np.array((self.p_empty,) + tuple(self.p_single))
        picks = rng.choice(len(probs), size=size, p=probs / probs.sum())
        return [0 if k == 0 else 1 << (int(k) - 1) for k in picks]


@dataclass(frozen=True)
class Independent:
    """Node ``v`` is ill-behaved with probability ``p[v]``, independently of the others."""

    p: Tuple[float, ...]

    def validate(self, n: int):
        if len(self.p) != n:
            raise InvalidDistribution(f"{len(self.p)} failure probabilities for {n} nodes")
        for v, x in enumerate(self.p):
            _check_prob(x, f"p[{v}]")

    def ill_probability(self, v: int) -> float:
        return self.p[v]

    def _uncertain(self) -> List[int]:
        return [v for v, x in enumerate(self.p) if 0.0 < x < 1.0]

    def support_size(self) -> int:
        return 1 << len(self._uncertain())

    def support(self) -> Iterator[Tuple[NodeSet, float]]:
        sure = 0
        for v, x in enumerate(self.p):
            if x == 1.0:
                sure |= 1 << v
        free = self._uncertain()
        k = len(free)
        idx = np.arange(1 << k, dtype=np.int64)
        bits = ((idx[:, None] >> np.arange(k)) & 1).astype(bool)
        pv = np.array([self.p[v] for v in free])
        probs = np.where(bits, pv, 1.0 - pv).prod(axis=1)
        masks = _masks_from_bits(bits)
        for j, m in enumerate(masks):
            b = sure
            for i in members(m):
                b |= 1 << free[i]
            yield b, float(probs[j])

    def marginal(self, keep: Sequence[int]) -> "Independent":
        return Independent(tuple(self.p[v] for v in keep))

    def sample(self, rng: np.random.Generator, size: int) -> List[NodeSet]:
        p = np.asarray(self.p, dtype=float)
        return _masks_from_bits(rng.random((size, len(p))) < p)


@dataclass(frozen=True)
class Grouped:
    """Independent organizations; ``tables[i]`` maps subsets of ``orgs[i]`` to probabilities."""

    orgs: Tuple[NodeSet, ...]
    tables: Tuple[Mapping[NodeSet, float], ...]

    def validate(self, n: int):
        _check_partition(self.orgs, n)
        if len(self.tables) != len(self.orgs):
            raise InvalidDistribution("one probability table per organization required")
        for i, (o, t) in enumerate(zip(self.orgs, self.tables)):
            for b, x in t.items():
                if b & ~o:
                    raise InvalidDistribution(f"table {i} has an entry outside its organization")
                _check_prob(x, f"table {i} entry")
            _check_total(sum(t.values()), f"table {i}")

    def ill_probability(self, v: int) -> float:
        for o, t in zip(self.orgs, self.tables):
            if (o >> v) & 1:
                return sum(x for b, x in t.items() if (b >> v) & 1)
        raise InvalidDistribution(f"node {v} is in no organization")

    def _entries(self) -> List[List[Tuple[NodeSet, float]]]:
        return [[(b, x) for b, x in sorted(t.items()) if x > 0] for t in self.tables]

    def support_size(self) -> int:
        return prod(len(e) for e in self._entries())

    def support(self) -> Iterator[Tuple[NodeSet, float]]:
        for combo in product(*self._entries()):
            b, x = 0, 1.0
            for m, px in combo:
                b |= m
                x *= px
            yield b, x

    def marginal(self, keep: Sequence[int]) -> "Grouped":
        z = sum(1 << v for v in keep)
        orgs, tables = [], []
        for o, t in zip(self.orgs, self.tables):
            if not o & z:
                continue
            table: Dict[NodeSet, float] = {}
            for b, x in t.items():
                key = _compress(b & z, keep)
                table[key] = table.get(key, 0.0) + x
            orgs.append(_compress(o & z, keep))
            tables.append(table)
        return Grouped(tuple(orgs), tuple(tables))

    def sample(self, rng: np.random.Generator, size: int) -> List[NodeSet]:
        out = np.zeros(size, dtype=object)
        out[:] = 0
        for entries in self._entries():
            masks = np.array([m for m, _ in entries], dtype=object)
            probs = np.array([x for _, x in entries])
            out = out | masks[rng.choice(len(entries), size=size, p=probs / probs.sum())]
        return [int(x) for x in out]


@dataclass(frozen=True)
class GroupedByzantine:
    """Per organization: the whole organization turns Byzantine with ``r[i]``,
    otherwise each member fails on its own with ``q[i]``."""

    orgs: Tuple[NodeSet, ...]
    q: Tuple[float, ...]
    r: Tuple[float, ...]

    def validate(self, n: int):
        _check_partition(self.orgs, n)
        if not len(self.q) == len(self.r) == len(self.orgs):
            raise InvalidDistribution("one q and one r per organization required")
        for i in range(len(self.orgs)):
            _check_prob(self.q[i], f"q[{i}]")
            _check_prob(self.r[i], f"r[{i}]")

    def org_table(self, i: int) -> Dict[NodeSet, float]:
        o, q, r = self.orgs[i], self.q[i], self.r[i]
        nodes = list(members(o))
        size = len(nodes)
        table = {}
        for k in range(size + 1):
            x = (1 - r) * q ** k * (1 - q) ** (size - k)
            for c in combinations(nodes, k):
                table[sum(1 << v for v in c)] = x
        table[o] = r + (1 - r) * q ** size
        return table

    def to_grouped(self) -> Grouped:
        return Grouped(self.orgs, tuple(self.org_table(i) for i in range(len(self.orgs))))

    def ill_probability(self, v: int) -> float:
        for o, q, r in zip(self.orgs, self.q, self.r):
            if (o >> v) & 1:
                return r + (1 - r) * q
        raise InvalidDistribution(f"node {v} is in no organization")

    def support_size(self) -> int:
        return self.to_grouped().support_size()

    def support(self) -> Iterator[Tuple[NodeSet, float]]:
        return self.to_grouped().support()

    def marginal(self, keep: Sequence[int]) -> Grouped:
        return self.to_grouped().marginal(keep)

    def sample(self, rng: np.random.Generator, size: int) -> List[NodeSet]:
        n = max(o.bit_length() for o in self.orgs)
        bits = np.zeros((size, n), dtype=bool)
        for o, q, r in zip(self.orgs, self.q, self.r):
            cols = list(members(o))
            byz = rng.random(size) < r
            fail = rng.random((size, len(cols))) < q
            bits[:, cols] = fail | byz[:, None]
        return _masks_from_bits(bits)


@dataclass(frozen=True)
class Explicit:
    table: Mapping[NodeSet, float] = field(default_factory=dict)

    def validate(self, n: int):
        limit = full(n)
        for b, x in self.table.items():
            if b & ~limit:
                raise InvalidDistribution("table entry outside the node set")
            _check_prob(x, "table entry")
        _check_total(sum(self.table.values()), "table")

    def ill_probability(self, v: int) -> float:
        return sum(x for b, x in self.table.items() if (b >> v) & 1)

    def support_size(self) -> int:
        return len(self.table)

    def support(self) -> Iterator[Tuple[NodeSet, float]]:
        for b, x in sorted(self.table.items()):
            if x > 0:
                yield b, x

    def marginal(self, keep: Sequence[int]) -> "Explicit":
        table: Dict[NodeSet, float] = {}
        for b, x in self.table.items():
            key = _compress(b, keep)
            table[key] = table.get(key, 0.0) + x
        return Explicit(table)

    def sample(self, rng: np.random.Generator, size: int) -> List[NodeSet]:
        entries = list(self.support())
        probs = np.array([x for _, x in entries])
        picks = rng.choice(len(entries), size=size, p=probs / probs.sum())
        return [entries[int(k)][0] for k in picks]


Distribution = Union[AtMostOne, Independent, Grouped, GroupedByzantine, Explicit]


def _check_partition(orgs: Sequence[NodeSet], n: int):
    seen = 0
    for o in orgs:
        if not o:
            raise PartitionInvalid("empty organization")
        if o & seen:
            raise PartitionInvalid("organizations overlap")
        seen |= o
    if seen != full(n):
        raise PartitionInvalid("organizations do not cover every node")


@dataclass(frozen=True)
class IntactProbability:
    node: int
    p_intact: float
    # None when the node is ill-behaved with probability 1
    p_intact_given_well_behaved: Optional[float]
    method: str
    samples: Optional[int] = None
    seed: Optional[int] = None
    std_error: Optional[float] = None


def _conditional(p_intact: float, p_well: float) -> Optional[float]:
    if p_well <= 0.0:
        return None
    return min(1.0, p_intact / p_well)


def _sum_intact(f: AnyFbas, dist: Distribution, nodes: Sequence[int]) -> Dict[int, float]:
    acc = {v: 0.0 for v in nodes}
    for b, x in dist.support():
        intact = intact_nodes(f, b).intact
        for v in nodes:
            if (intact >> v) & 1:
                acc[v] += x
    return acc


def _guard_support(dist: Distribution):
    limit = 1 << config.EXACT_PROBABILITY_LIMIT
    if isinstance(dist, (AtMostOne, Explicit)):
        return
    if dist.support_size() > limit:
        raise InstanceTooLarge(f"exact summation over {dist.support_size()} sets exceeds {limit}")


def intact_probability_exact(f: AnyFbas, v: Optional[int], dist: Distribution):
    """Exact ``P(v intact)`` by summing over every ``B`` with ``p(B) > 0``.

    ``v=None`` returns a list with one result per node.
    """
    dist.validate(f.n)
    _guard_support(dist)
    nodes = list(range(f.n)) if v is None else [v]
    method = "at_most_one" if isinstance(dist, AtMostOne) else "exact"
    acc = _sum_intact(f, dist, nodes)
    out = [IntactProbability(u, acc[u], _conditional(acc[u], 1.0 - dist.ill_probability(u)), method)
           for u in nodes]
    return out if v is None else out[0]


def intact_probability_grouped(f: AnyFbas, v: int, dist: Distribution) -> IntactProbability:
    """Exact ``P(v intact)`` computed on the trust cluster of ``v`` only.

    Nodes outside the smallest trust cluster around ``v`` cannot affect its
    intactness, so the distribution is marginalized onto that cluster first.
    """
    dist.validate(f.n)
    if isinstance(dist, GroupedByzantine):
        dist = dist.to_grouped()
    z = build_trust_graph(f).reachable(1 << v)
    keep = list(members(z))
    sub = restrict(f, z)
    local = dist.marginal(keep)
    _guard_support(local)
    i = keep.index(v)
    p = _sum_intact(sub, local, [i])[i]
    return IntactProbability(v, p, _conditional(p, 1.0 - dist.ill_probability(v)), "grouped")


def maximal_dsets_avoiding(f: AnyFbas, v: int, cap: int = None) -> List[NodeSet]:
    """Maximal DSets without ``v``: complements of the minimal quorums ``Q``
    containing ``v`` whose outside can be deleted keeping quorum intersection."""
    if cap is None:
        cap = config.MAX_DSETS_INCL_EXCL
    if f.n > config.B_INTACT_LIMIT:
        raise InstanceTooLarge(f"DSet search is limited to {config.B_INTACT_LIMIT} nodes")
    good = [q for q in traverse_quorums(f, 1 << v, f.all & ~(1 << v))
            if quorum_intersection(f, f.all & ~q).intersects]
    minimal = [q for q in good if not any(p != q and p & ~q == 0 for p in good)]
    if len(minimal) > cap:
        raise TooManyMaximalDsets(f"{len(minimal)} maximal DSets avoid node {v}, cap is {cap}")
    return sorted(f.all & ~q for q in minimal)


def intact_probability_incl_excl(f: AnyFbas, v: int, dist: Independent, cap: int = None) -> IntactProbability:
    """``P(B is inside some DSet avoiding v)`` by inclusion-exclusion over the maximal ones."""
    dist.validate(f.n)
    if not quorum_intersection(f).intersects:
        intact_nodes(f, 0)  # raises NoQuorumIntersection
    dsets = maximal_dsets_avoiding(f, v, cap)
    total = 0.0
    for k in range(1, len(dsets) + 1):
        sign = 1.0 if k % 2 else -1.0
        for combo in combinations(dsets, k):
            inter = f.all
            for d in combo:
                inter &= d
            total += sign * prod(1.0 - dist.p[u] for u in members(f.all & ~inter))
    return IntactProbability(v, total, _conditional(total, 1.0 - dist.p[v]), "inclusion_exclusion")


def intact_probability_mc(f: AnyFbas, v: Optional[int], dist: Distribution, samples: int,
                          seed: int = 0, lanes: int = 1):
    """Monte Carlo estimate from ``samples`` draws of ``B``.

    Draws come in blocks of fixed size, block ``i`` from the ``i``-th child
    of ``SeedSequence(seed)``, so the estimate depends on the seed only and
    not on the number of lanes. ``v=None`` estimates every node.
    """
    dist.validate(f.n)
    if samples < 1:
        raise InvalidDistribution("at least one sample required")
    if not quorum_intersection(f).intersects:
        intact_nodes(f, 0)  # raises NoQuorumIntersection
    nblocks = -(-samples // MC_BLOCK)
    streams = substreams(seed, nblocks)
    sizes = [MC_BLOCK] * (nblocks - 1) + [samples - MC_BLOCK * (nblocks - 1)]

    def draw(i):
        return dist.sample(streams[i], sizes[i])

    if lanes > 1:
        with ThreadPoolExecutor(lanes) as pool:
            blocks = list(pool.map(draw, range(nblocks)))
    else:
        blocks = [draw(i) for i in range(nblocks)]

    nodes = list(range(f.n)) if v is None else [v]
    hits = np.zeros(f.n, dtype=np.int64)
    well = np.zeros(f.n, dtype=np.int64)
    counts: Dict[NodeSet, int] = {}
    for block in blocks:
        for b in block:
            counts[b] = counts.get(b, 0) + 1
    for b, c in counts.items():
        intact = intact_nodes(f, b).intact
        for u in nodes:
            if (intact >> u) & 1:
                hits[u] += c
            if not (b >> u) & 1:
                well[u] += c
    out = []
    for u in nodes:
        p = hits[u] / samples
        cond = hits[u] / well[u] if well[u] else None
        out.append(IntactProbability(u, float(p), None if cond is None else float(cond), "monte_carlo",
                                     samples, seed, sqrt(p * (1 - p) / samples)))
    return out if v is None else out[0]


def hierarchy_4org_from_e(e: float, p_a2: float, p_a3: float) -> float:
    """``P(a1 intact)`` in the four-organization hierarchy when every
    organization is untouched with probability ``e``."""
    return e ** 3 * (p_a2 + p_a3 + 3 - 2 * e)


def closed_form_hierarchy_4org(q: float, r: float, p_a_singletons: Tuple[float, float] = None) -> float:
    """Same, with ``e = (1-r)(1-q)^3``; the probabilities of ``{a2}`` and
    ``{a3}`` default to the Byzantine model's ``(1-r) q (1-q)^2``."""
    for x, name in ((q, "q"), (r, "r")):
        _check_prob(x, name)
    e = (1 - r) * (1 - q) ** 3
    if p_a_singletons is None:
        single = (1 - r) * q * (1 - q) ** 2
        p_a_singletons = (single, single)
    return hierarchy_4org_from_e(e, *p_a_singletons)


def closed_form_symmetric_12_8(q: float, r: float) -> float:
    """``P(v intact)`` in the symmetric FBAS with 12 nodes and threshold 8
    over four organizations of three, by counting the sets ``B`` of each shape."""
    w = 1 - r
    return (w ** 4 * (1 - q) ** 12
            + 11 * w ** 4 * q * (1 - q) ** 11
            + 55 * w ** 4 * q ** 2 * (1 - q) ** 10
            + 162 * w ** 4 * q ** 3 * (1 - q) ** 9
            + 3 * w ** 3 * (1 - q) ** 9 * (r + w * q ** 3))

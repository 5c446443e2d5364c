"""Brute-force reference implementations and test instance generators.

The oracles work on plain frozensets of node indices and read the slices
directly, so they share no code with the bitmask algorithms they check.
"""
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from . import config
from .errors import InstanceTooLarge, MalformedFormula
from .generators import generate_hierarchy_fbas, generate_org_fbas, generate_symmetric
from .model import AnyFbas, GeneralFbas, SimpleFbas, general_from_masks, make_simple, simple_from_masks
from .nodeset import members
from .rng import Seed, make_rng

Nodes = FrozenSet[int]


def _powerset(items: Sequence[int]):
    items = list(items)
    return (frozenset(c) for r in range(len(items) + 1) for c in combinations(items, r))


def _slices(f: AnyFbas) -> List[List[Nodes]]:
    """Explicit slices as frozensets; simple FBAS are expanded here from scratch."""
    if f.is_simple:
        out = []
        for v in range(f.n):
            others = [u for u in members(f.q[v]) if u != v]
            out.append([frozenset((v,) + c) for c in combinations(others, f.thresholds[v] - 1)])
        return out
    return [[frozenset(members(s)) for s in ss] for ss in f.slices]


def _guard(f: AnyFbas, limit: int, what: str):
    if f.n > limit:
        raise InstanceTooLarge(f"{what} oracle is limited to {limit} nodes, got {f.n}")


def _is_quorum(slices, q: Nodes, d: Nodes = frozenset(), free: Nodes = frozenset()) -> bool:
    return bool(q) and all(any(s - d <= q for s in slices[v]) for v in q - free)


def _quorums_of(slices, nodes: Nodes, d: Nodes = frozenset(), free: Nodes = frozenset()) -> Set[Nodes]:
    return {q for q in _powerset(sorted(nodes)) if _is_quorum(slices, q, d, free)}


def _has_intersection(quorums) -> bool:
    qs = list(quorums)
    return all(a & b for i, a in enumerate(qs) for b in qs[i + 1:])


def brute_quorums(f: AnyFbas, d: Nodes = frozenset()) -> Set[Nodes]:
    _guard(f, config.BRUTE_QUORUM_LIMIT, "quorum")
    return _quorums_of(_slices(f), frozenset(range(f.n)) - d, d)


def brute_min_quorums(f: AnyFbas, d: Nodes = frozenset()) -> Set[Nodes]:
    qs = brute_quorums(f, d)
    return {q for q in qs if not any(p < q for p in qs)}


def brute_quorum_intersection(f: AnyFbas, d: Nodes = frozenset()) -> bool:
    return _has_intersection(brute_quorums(f, d))


def brute_b_quorums(f: AnyFbas, b: Nodes) -> Set[Nodes]:
    _guard(f, config.BRUTE_QUORUM_LIMIT, "B-quorum")
    return _quorums_of(_slices(f), frozenset(range(f.n)), free=frozenset(b))


def brute_dsets(f: AnyFbas) -> Set[Nodes]:
    _guard(f, config.BRUTE_DSET_LIMIT, "DSet")
    slices = _slices(f)
    everything = frozenset(range(f.n))
    out = set()
    for d in _powerset(range(f.n)):
        rest = everything - d
        if not rest:
            out.add(d)
        elif _is_quorum(slices, rest) and _has_intersection(_quorums_of(slices, rest, d)):
            out.add(d)
    return out


def brute_intact(f: AnyFbas, b: Nodes, dsets: Set[Nodes] = None) -> Nodes:
    """Nodes missed by some DSet that covers ``b``."""
    if dsets is None:
        dsets = brute_dsets(f)
    everything = frozenset(range(f.n))
    out = frozenset()
    for d in dsets:
        if b <= d:
            out |= everything - d
    return out


def brute_b_intact_set(f: AnyFbas, b: Nodes, u: Nodes) -> bool:
    if not u:
        return True
    bq = brute_b_quorums(f, b)
    if u not in bq:
        return False
    touching = [q for q in bq if q & u]
    return all(q & p & u for q in touching for p in touching)


def to_frozen(mask: int) -> Nodes:
    return frozenset(members(mask))


def to_mask(nodes) -> int:
    out = 0
    for v in nodes:
        out |= 1 << v
    return out


# -- 3-SAT -----------------------------------------------------------------

Literal = Tuple[int, bool]


@dataclass(frozen=True)
class CnfFormula:
    """``r`` variables and clauses of exactly three ``(variable, negated)`` literals."""

    r: int
    clauses: Tuple[Tuple[Literal, Literal, Literal], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple((int(x), bool(neg)) for x, neg in c) for c in self.clauses))
        if self.r < 1:
            raise MalformedFormula("a formula needs at least one variable")
        if not self.clauses:
            raise MalformedFormula("a formula needs at least one clause")
        for c in self.clauses:
            if len(c) != 3:
                raise MalformedFormula(f"clause {c} does not have exactly three literals")
            for x, _ in c:
                if not 0 <= x < self.r:
                    raise MalformedFormula(f"variable index {x} outside [0, {self.r})")

    @property
    def m(self) -> int:
        return len(self.clauses)

    def evaluate(self, assignment: Sequence[bool]) -> bool:
        return all(any(assignment[x] != neg for x, neg in c) for c in self.clauses)


def brute_sat(phi: CnfFormula) -> Optional[Tuple[bool, ...]]:
    """A satisfying assignment, or None."""
    if phi.r > 20:
        raise InstanceTooLarge("brute-force SAT is limited to 20 variables")
    for a in product((False, True), repeat=phi.r):
        if phi.evaluate(a):
            return a
    return None


def reduce_3sat(phi: CnfFormula) -> SimpleFbas:
    """Simple FBAS that has two disjoint quorums iff ``phi`` is satisfiable.

    Nodes: a star, per variable ``a_k, x_k, ~x_k``, per clause ``b_i`` and one
    ``c_i_j`` per literal position.
    """
    r, m = phi.r, phi.m
    names = ["*"]
    for k in range(1, r + 1):
        names += [f"a{k}", f"x{k}", f"~x{k}"]
    for i in range(1, m + 1):
        names += [f"b{i}", f"c{i}_1", f"c{i}_2", f"c{i}_3"]
    idx = {name: i for i, name in enumerate(names)}

    def lit_name(x, neg):
        return f"~x{x + 1}" if neg else f"x{x + 1}"

    q: Dict[str, Set[str]] = {}
    n: Dict[str, int] = {}
    q["*"] = {"*"} | {f"b{i}" for i in range(1, m + 1)}
    n["*"] = m + 1
    for k in range(1, r + 1):
        q[f"a{k}"] = {f"a{k}", f"x{k}", f"~x{k}"}
        n[f"a{k}"] = 2
        succ = f"a{k % r + 1}"
        for lit in (f"x{k}", f"~x{k}"):
            q[lit] = {lit, succ}
    for i, clause in enumerate(phi.clauses, start=1):
        q[f"b{i}"] = {f"b{i}"} | {f"c{i}_{j}" for j in (1, 2, 3)}
        n[f"b{i}"] = 2
        for j, (x, neg) in enumerate(clause, start=1):
            c = f"c{i}_{j}"
            q[lit_name(x, neg)].add(c)
            q[c] = {c, "*", "a1"}
            n[c] = 2
    for k in range(1, r + 1):
        for lit in (f"x{k}", f"~x{k}"):
            n[lit] = len(q[lit])
    return make_simple(len(names), [[idx[u] for u in q[v]] for v in names], [n[v] for v in names], names)


def all_3cnf(r: int, m: int):
    """Every formula with ``r`` variables and ``m`` clauses, up to renaming and
    flipping variables and reordering clauses and literals."""
    lits = [(x, neg) for x in range(r) for neg in (False, True)]
    clause_list = sorted({tuple(sorted(c)) for c in product(lits, repeat=3)})
    perms = []
    for p in permutations(range(r)):
        for flips in product((False, True), repeat=r):
            perms.append((p, flips))
    seen = set()
    for clauses in combinations_with_replacement(clause_list, m):
        key = min(_canon(clauses, p, fl) for p, fl in perms)
        if key in seen:
            continue
        seen.add(key)
        yield CnfFormula(r, key)


def _canon(clauses, perm, flips):
    out = []
    for c in clauses:
        out.append(tuple(sorted((perm[x], neg != flips[x]) for x, neg in c)))
    return tuple(sorted(out))


# -- random instances ----------------------------------------------------

def random_general_fbas(seed: Seed, n: int, max_slices: int = 3, density: float = 0.4) -> GeneralFbas:
    rng = make_rng(seed)
    slices = []
    for v in range(n):
        count = int(rng.integers(1, max_slices + 1))
        ss = set()
        for _ in range(count):
            mask = 1 << v
            for u in range(n):
                if u != v and rng.random() < density:
                    mask |= 1 << u
            ss.add(mask)
        slices.append(sorted(ss))
    return general_from_masks(n, slices)


def random_simple_fbas(seed: Seed, n: int, density: float = 0.6) -> SimpleFbas:
    rng = make_rng(seed)
    q, k = [], []
    for v in range(n):
        mask = 1 << v
        for u in range(n):
            if u != v and rng.random() < density:
                mask |= 1 << u
        q.append(mask)
        k.append(int(rng.integers(1, mask.bit_count() + 1)))
    return simple_from_masks(n, q, k)


def random_symmetric_fbas(seed: Seed, n_max: int) -> SimpleFbas:
    rng = make_rng(seed)
    n = int(rng.integers(1, n_max + 1))
    return generate_symmetric(n, int(rng.integers(1, n + 1)))


def random_org_fbas(seed: Seed, n_max: int) -> GeneralFbas:
    """Two-level organization FBAS, personalized or pooled, at most ``n_max`` nodes."""
    rng = make_rng(seed)
    sizes = []
    while True:
        s = int(rng.integers(1, 4))
        if sum(sizes) + s > n_max:
            break
        sizes.append(s)
        if rng.random() < 0.25:
            break
    if not sizes:
        sizes = [1]
    org_t = [int(rng.integers(1, s + 1)) for s in sizes]
    root = int(rng.integers(1, len(sizes) + 1))
    if rng.random() < 0.5:
        return generate_org_fbas(sizes, org_t, root)
    return generate_hierarchy_fbas(sizes, org_t, root)

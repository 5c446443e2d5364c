"""Trust graph, strongly connected components and trust clusters."""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .definitions import QuorumSliceDefinition
from .errors import NotATrustCluster, ValidationError
from .model import AnyFbas, GeneralFbas, SimpleFbas
from .nodeset import NodeSet, members


@dataclass(frozen=True)
class TrustGraph:
    n: int
    out_edges: Tuple[NodeSet, ...]

    def reachable(self, start: NodeSet) -> NodeSet:
        seen = start
        frontier = start
        while frontier:
            nxt = 0
            for v in members(frontier):
                nxt |= self.out_edges[v]
            frontier = nxt & ~seen
            seen |= nxt
        return seen

    def in_degrees(self) -> List[int]:
        deg = [0] * self.n
        for u in range(self.n):
            for v in members(self.out_edges[u]):
                if v != u:
                    deg[v] += 1
        return deg


@dataclass(frozen=True)
class SccPartition:
    components: Tuple[NodeSet, ...]
    # condensation[i]: indices of components directly reachable from component i
    condensation: Tuple[frozenset, ...]
    maximal: Tuple[int, ...]
    greatest: Optional[int]

    def component_of(self, v: int) -> int:
        for i, c in enumerate(self.components):
            if (c >> v) & 1:
                return i
        raise ValueError(f"node {v} not covered")


def build_trust_graph(f: AnyFbas) -> TrustGraph:
    return TrustGraph(f.n, tuple(f.trust_out))


def strongly_connected_components(g: TrustGraph) -> List[NodeSet]:
    """Tarjan's algorithm with an explicit stack."""
    index = [-1] * g.n
    low = [0] * g.n
    on_stack = [False] * g.n
    stack: List[int] = []
    comps: List[NodeSet] = []
    counter = 0
    succ = [list(members(m)) for m in g.out_edges]
    for root in range(g.n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = 0
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp |= 1 << w
                    if w == v:
                        break
                comps.append(comp)
    return comps


def scc_partition(g: TrustGraph) -> SccPartition:
    comps = sorted(strongly_connected_components(g), key=lambda c: (c & -c))
    where = [0] * g.n
    for i, c in enumerate(comps):
        for v in members(c):
            where[v] = i
    edges = []
    for i, c in enumerate(comps):
        out = set()
        for v in members(c):
            for w in members(g.out_edges[v]):
                if where[w] != i:
                    out.add(where[w])
        edges.append(frozenset(out))
    maximal = tuple(i for i, e in enumerate(edges) if not e)
    # a finite DAG with a single sink has that sink reachable from everywhere
    greatest = maximal[0] if len(maximal) == 1 else None
    return SccPartition(tuple(comps), tuple(edges), maximal, greatest)


def is_trust_cluster(g: TrustGraph, z: NodeSet) -> bool:
    for v in members(z):
        if g.out_edges[v] & ~z:
            return False
    return True


def _compress(mask: NodeSet, new_index: Sequence[int]) -> NodeSet:
    out = 0
    for v in members(mask):
        out |= 1 << new_index[v]
    return out


def _compress_definition(d: QuorumSliceDefinition, new_index: Sequence[int]) -> QuorumSliceDefinition:
    return QuorumSliceDefinition(d.threshold, _compress(d.validators, new_index),
                                 tuple(_compress_definition(c, new_index) for c in d.inner))


def restrict(f: AnyFbas, z: NodeSet) -> AnyFbas:
    """The FBAS ``(Z, S|Z)`` on a trust cluster ``z``, with nodes renumbered
    in ascending order of their old index."""
    if not z:
        raise ValidationError("cannot restrict to the empty set")
    if z & ~f.all:
        raise ValidationError("restriction set leaves the universe")
    if not is_trust_cluster(build_trust_graph(f), z):
        raise NotATrustCluster("set is not closed under trust-graph reachability")
    if z == f.all:
        return f
    keep = list(members(z))
    new_index = [-1] * f.n
    for i, v in enumerate(keep):
        new_index[v] = i
    names = tuple(f.names[v] for v in keep)
    if f.is_simple:
        return SimpleFbas(len(keep), tuple(_compress(f.q[v], new_index) for v in keep),
                          tuple(f.thresholds[v] for v in keep), names)
    slices = tuple(tuple(_compress(s, new_index) for s in f.slices[v]) for v in keep)
    defs = None
    if f.definitions is not None:
        defs = tuple(
            _compress_definition(f.definitions[v], new_index)
            if f.definitions[v] is not None and not f.definitions[v].all_nodes() & ~z else None
            for v in keep
        )
    return GeneralFbas(len(keep), slices, names, defs)


def expand_mask(mask: NodeSet, keep: Sequence[int]) -> NodeSet:
    """Map a node set of a restricted FBAS back to original indices."""
    out = 0
    for i in members(mask):
        out |= 1 << keep[i]
    return out

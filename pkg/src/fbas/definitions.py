"""Threshold-tree quorum slice definitions.

A definition ``(t, N, C)`` asks for ``t`` satisfied members out of the
validators ``N`` and the inner definitions ``C``. Validators are node-index
bitmasks.
"""
from dataclasses import dataclass, field
from itertools import combinations
from typing import AbstractSet, FrozenSet, Hashable, Iterable, List, Sequence, Tuple, TypeVar

from . import config
from .errors import ExpansionTooLarge, KTooLarge, ValidationError
from .nodeset import NodeSet, members, size

T = TypeVar("T", bound=Hashable)


@dataclass(frozen=True)
class QuorumSliceDefinition:
    threshold: int
    validators: NodeSet = 0
    inner: Tuple["QuorumSliceDefinition", ...] = field(default=())

    def __post_init__(self):
        if not isinstance(self.inner, tuple):
            object.__setattr__(self, "inner", tuple(self.inner))
        if not 0 <= self.threshold <= size(self.validators) + len(self.inner):
            raise ValidationError(
                f"threshold {self.threshold} outside [0, {size(self.validators) + len(self.inner)}]"
            )
        seen = self.validators
        for child in self.inner:
            nodes = child.all_nodes()
            if nodes & seen:
                raise ValidationError("validator sets of a slice definition tree must be disjoint")
            seen |= nodes

    def all_nodes(self) -> NodeSet:
        out = self.validators
        for child in self.inner:
            out |= child.all_nodes()
        return out

    def is_satisfied_by(self, x: NodeSet) -> bool:
        """Whether some slice generated by this definition is a subset of ``x``."""
        need = self.threshold - (self.validators & x).bit_count()
        if need <= 0:
            return True
        for child in self.inner:
            if child.is_satisfied_by(x):
                need -= 1
                if need == 0:
                    return True
        return False


def k_subsets(m: Iterable[T], k: int) -> List[FrozenSet[T]]:
    items = sorted(set(m), key=_sort_key)
    if k < 0 or k > len(items):
        raise KTooLarge(f"k={k} for a set of {len(items)} elements")
    return [frozenset(c) for c in combinations(items, k)]


def _sort_key(x):
    return (type(x).__name__, x)


def product_set_union(*families: AbstractSet) -> set:
    """All unions taking one member from each family, duplicates removed.

    Works for families of frozensets as well as families of bitmasks.
    """
    if not families:
        raise ValueError("product_set_union needs at least one family")
    acc = set(families[0])
    for fam in families[1:]:
        acc = {a | b for a in acc for b in fam}
    return acc


def generate_slices(d: QuorumSliceDefinition, cap: int = None) -> FrozenSet[NodeSet]:
    if cap is None:
        cap = config.EXPANSION_CAP
    return frozenset(_generate(d, cap))


def _generate(d: QuorumSliceDefinition, cap: int) -> set:
    options = [{1 << v} for v in members(d.validators)]
    options += [_generate(c, cap) for c in d.inner]
    out = set()
    for chosen in combinations(options, d.threshold):
        acc = {0}
        for fam in chosen:
            acc = {a | b for a in acc for b in fam}
            if len(acc) > cap:
                raise ExpansionTooLarge(f"slice generation exceeds cap {cap}")
        out |= acc
        if len(out) > cap:
            raise ExpansionTooLarge(f"slice generation exceeds cap {cap}")
    return out


def remove_node(d: QuorumSliceDefinition, v: int) -> QuorumSliceDefinition:
    bit = 1 << v
    if d.validators & bit:
        # t = 0 would go negative; 0 already means "always satisfied"
        return QuorumSliceDefinition(max(d.threshold - 1, 0), d.validators & ~bit, d.inner)
    return QuorumSliceDefinition(d.threshold, d.validators, tuple(remove_node(c, v) for c in d.inner))


def personalize(d: QuorumSliceDefinition, v: int) -> QuorumSliceDefinition:
    """The definition a node ``v`` actually runs: ``(2, {v}, {R_v(d)})``."""
    return QuorumSliceDefinition(2, 1 << v, (remove_node(d, v),))


def org_definition(orgs: Sequence[NodeSet], org_thresholds: Sequence[int], root_threshold: int) -> QuorumSliceDefinition:
    """``(t, {}, {(t_1, A_1, {}), ..., (t_n, A_n, {})})``."""
    if len(orgs) != len(org_thresholds):
        raise ValidationError("one threshold per organization required")
    children = tuple(QuorumSliceDefinition(t, o) for o, t in zip(orgs, org_thresholds))
    return QuorumSliceDefinition(root_threshold, 0, children)

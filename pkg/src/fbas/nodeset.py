"""Node sets as integer bitmasks.

Node ``i`` is bit ``i``. Python ints give O(1)-ish union/intersection and a
native popcount, which is what the subset searches need; iteration always
runs in ascending index order.
"""
from typing import Iterable, Iterator, List

NodeSet = int


def nodeset(nodes: Iterable[int] = ()) -> NodeSet:
    mask = 0
    for v in nodes:
        if v < 0:
            raise ValueError(f"negative node index {v}")
        mask |= 1 << v
    return mask


def full(n: int) -> NodeSet:
    return (1 << n) - 1


def members(mask: NodeSet) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_list(mask: NodeSet) -> List[int]:
    return list(members(mask))


def size(mask: NodeSet) -> int:
    return mask.bit_count()


def contains(mask: NodeSet, v: int) -> bool:
    return (mask >> v) & 1 == 1


def is_subset(a: NodeSet, b: NodeSet) -> bool:
    return a & ~b == 0


def lowest(mask: NodeSet) -> int:
    if not mask:
        raise ValueError("empty node set")
    return (mask & -mask).bit_length() - 1


def subsets(mask: NodeSet) -> Iterator[NodeSet]:
    """All subsets of ``mask`` (including empty and ``mask`` itself)."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask

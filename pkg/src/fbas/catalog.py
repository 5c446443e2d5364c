"""Small named FBAS used throughout the tests and demos."""
from .generators import generate_hierarchy_fbas, generate_symmetric, org_partition
from .model import GeneralFbas, SimpleFbas, make_general, make_simple


def seven_node_fbas() -> GeneralFbas:
    """Two triangles {1,2,3} and {4,5,6} that both need node 7; 7 trusts only itself."""
    left = [0, 1, 2, 6]
    right = [3, 4, 5, 6]
    slices = [[left]] * 3 + [[right]] * 3 + [[[6]]]
    return make_general(7, slices, names=[str(i) for i in range(1, 8)])


def singleton_slices_fbas(n: int) -> SimpleFbas:
    """Every node trusts only itself: every non-empty set is a quorum."""
    return make_simple(n, [[i] for i in range(n)], [1] * n, names=[str(i) for i in range(1, n + 1)])


def whole_set_fbas(n: int) -> GeneralFbas:
    """Every node's only slice is the whole node set."""
    return make_general(n, [[list(range(n))]] * n, names=[str(i) for i in range(1, n + 1)])


def pairwise_fbas(n: int) -> SimpleFbas:
    """Slices are all pairs: the symmetric FBAS with threshold 2."""
    return generate_symmetric(n, 2, names=[str(i) for i in range(1, n + 1)])


def befouled_quorum_fbas() -> GeneralFbas:
    """Four nodes where {c,d} is a B-intact set for B={a} but no node is B-intact."""
    a, b, c, d = range(4)
    return make_general(4, [
        [[a, b]],
        [[a, b, c, d]],
        [[b, c], [c, d]],
        [[b, d], [c, d]],
    ], names="abcd")


def six_org_hierarchy_fbas() -> GeneralFbas:
    """5 of 6 organizations, 2 of 3 nodes (3 of 5 for the last one), slices pooled."""
    return generate_hierarchy_fbas([3, 3, 3, 3, 3, 5], [2, 2, 2, 2, 2, 3], 5)


def four_org_hierarchy_fbas() -> GeneralFbas:
    """3 of 4 organizations with 2 of 3 nodes each, slices pooled."""
    return generate_hierarchy_fbas([3, 3, 3, 3], [2, 2, 2, 2], 3)


def four_org_partition():
    return org_partition([3, 3, 3, 3])


def four_org_symmetric_fbas() -> SimpleFbas:
    """The same twelve nodes as :func:`four_org_hierarchy_fbas`, laid out as (12, 8)."""
    names = four_org_hierarchy_fbas().names
    return generate_symmetric(12, 8, names=names)

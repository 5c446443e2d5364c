"""FBAS families built from organizations and thresholds."""
from string import ascii_uppercase
from typing import List, Sequence, Tuple

from .definitions import QuorumSliceDefinition, generate_slices, org_definition, personalize
from .errors import ThresholdOutOfRange, ValidationError
from .model import GeneralFbas, SimpleFbas, general_from_masks, simple_from_masks
from .nodeset import full


def _org_layout(org_sizes: Sequence[int], org_names: Sequence[str] = None) -> Tuple[List[int], List[str], List[str]]:
    if not org_sizes or any(s < 1 for s in org_sizes):
        raise ValidationError("organizations need at least one node each")
    if org_names is None:
        if len(org_sizes) <= 26:
            org_names = list(ascii_uppercase[: len(org_sizes)])
        else:
            org_names = [f"O{i + 1}" for i in range(len(org_sizes))]
    if len(org_names) != len(org_sizes):
        raise ValidationError("one name per organization required")
    masks, names, start = [], [], 0
    for org, sz in zip(org_names, org_sizes):
        masks.append(full(sz) << start)
        names += [f"{org.lower()}{i + 1}" for i in range(sz)]
        start += sz
    return masks, names, list(org_names)


def _check_thresholds(org_sizes, org_thresholds, root_threshold):
    if len(org_thresholds) != len(org_sizes):
        raise ValidationError("one threshold per organization required")
    for sz, t in zip(org_sizes, org_thresholds):
        if not 1 <= t <= sz:
            raise ThresholdOutOfRange(f"organization threshold {t} for {sz} nodes")
    if not 1 <= root_threshold <= len(org_sizes):
        raise ThresholdOutOfRange(f"root threshold {root_threshold} for {len(org_sizes)} organizations")


def generate_org_fbas(org_sizes: Sequence[int], org_thresholds: Sequence[int], root_threshold: int,
                      org_names: Sequence[str] = None) -> GeneralFbas:
    """Every node runs the personalized form of one shared two-level definition.

    Returns the FBAS; organizations are available via :func:`org_partition`.
    """
    _check_thresholds(org_sizes, org_thresholds, root_threshold)
    orgs, names, _ = _org_layout(org_sizes, org_names)
    d = org_definition(orgs, org_thresholds, root_threshold)
    n = len(names)
    slices = [generate_slices(personalize(d, v)) for v in range(n)]
    return general_from_masks(n, [sorted(ss) for ss in slices], names, [d] * n)


def generate_hierarchy_fbas(org_sizes: Sequence[int], org_thresholds: Sequence[int], root_threshold: int,
                            org_names: Sequence[str] = None) -> GeneralFbas:
    """Pool the slices of one unpersonalized definition; each node keeps the
    pooled slices that contain it."""
    _check_thresholds(org_sizes, org_thresholds, root_threshold)
    orgs, names, _ = _org_layout(org_sizes, org_names)
    pool = sorted(generate_slices(org_definition(orgs, org_thresholds, root_threshold)))
    n = len(names)
    slices = [[s for s in pool if (s >> v) & 1] for v in range(n)]
    return general_from_masks(n, slices, names)


def org_partition(org_sizes: Sequence[int], org_names: Sequence[str] = None) -> List[Tuple[str, int]]:
    orgs, _, onames = _org_layout(org_sizes, org_names)
    return list(zip(onames, orgs))


def generate_symmetric(n: int, k: int, names: Sequence[str] = None) -> SimpleFbas:
    if n < 1:
        raise ValidationError("an FBAS needs at least one node")
    if not 1 <= k <= n:
        raise ThresholdOutOfRange(f"k={k} outside [1, {n}]")
    return simple_from_masks(n, [full(n)] * n, [k] * n, names)


def stellar_base_definition() -> QuorumSliceDefinition:
    """The 2019 Stellar top tier: 5 of 6 organizations, 2 of 3 inside A-E, 3 of 5 inside F."""
    orgs, _, _ = _org_layout([3, 3, 3, 3, 3, 5])
    return org_definition(orgs, [2, 2, 2, 2, 2, 3], 5)


def stellar_fbas() -> GeneralFbas:
    return generate_org_fbas([3, 3, 3, 3, 3, 5], [2, 2, 2, 2, 2, 3], 5)

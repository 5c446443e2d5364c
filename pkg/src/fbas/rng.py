"""Seeded random streams.

Every random draw in the package comes from a numpy ``Generator`` on the
counter-based Philox bit generator, so a seed gives the same stream on every
platform. Independent substreams are spawned from a ``SeedSequence``.
"""
from typing import List, Union

import numpy as np

Seed = Union[int, np.random.SeedSequence, None]


def make_rng(seed: Seed = None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def substreams(seed: Seed, count: int) -> List[np.random.Generator]:
    """``count`` independent generators derived from one master seed."""
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return [np.random.Generator(np.random.Philox(child)) for child in ss.spawn(count)]

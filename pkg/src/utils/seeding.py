"""Seed stream splitting.

Every stochastic decision draws from its own generator built from
``SeedSequence([master_seed, stream_id, *keys])``. Stream ids are fixed
integers, so a new draw in one stream never shifts values in another and a
run is reproducible from its master seed alone.
"""

from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    """Named random streams."""

    INIT = 1
    TEACHER_INIT = 2
    TEACHER_SHUFFLE = 3
    SHUFFLE = 4
    NOISE = 5
    SPLIT = 6
    SELECTOR = 7
    EARLY = 8
    SWEEP = 9


def rng_for(master_seed: int, stream: Stream, *keys: int) -> np.random.Generator:
    """Generator for ``stream`` (optionally specialised by integer keys such as an epoch)."""
    entropy = [int(master_seed), int(stream), *(int(k) for k in keys)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(master_seed: int, stream: Stream, *keys: int) -> int:
    """Integer seed for components that take a plain seed (model init, child runs)."""
    return int(rng_for(master_seed, stream, *keys).integers(0, 2**31 - 1))

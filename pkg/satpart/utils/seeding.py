"""
Seed splitting.

Every command takes one 64-bit root seed. Independent random streams are derived from it as the
first 64-bit word of ``numpy.random.SeedSequence(entropy=root, spawn_key=(stream, *keys))``.
"""
from typing import Union

import numpy as np

STREAM_SECRET = 1
STREAM_SAMPLE = 2
STREAM_NEIGHBOR_ORDER = 3
STREAM_ACCEPTANCE = 4
STREAM_SUPB = 5
STREAM_ORACLE = 6

SEED_MASK = (1 << 64) - 1


def derive_seed(root: int, stream: int, *keys: int) -> int:
    """Derive a child 64-bit seed for a stream (and optional non-negative integer keys)."""
    sequence = np.random.SeedSequence(entropy=int(root) & SEED_MASK, spawn_key=(int(stream),) + tuple(int(k) for k in keys))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: Union[int, np.random.SeedSequence]) -> np.random.Generator:
    """Create the numpy generator used everywhere in the package."""
    return np.random.default_rng(seed)

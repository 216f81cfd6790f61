"""
Random samples of decomposition-family members.
"""
from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np

from satpart.estimator.decomposition import DecompositionSet
from satpart.utils.bits import words32
from satpart.utils.exceptions import EstimationError
from satpart.utils.seeding import STREAM_SAMPLE, derive_seed, make_rng


@dataclass(frozen=True)
class RandomSample:
    """N assignments of the decomposition set, drawn i.i.d. uniform with replacement."""
    dset: DecompositionSet
    seed: int
    assignments: np.ndarray

    @property
    def size(self) -> int:
        return int(self.assignments.shape[0])

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[Tuple[int, ...]]:
        for row in self.assignments:
            yield tuple(int(bit) for bit in row)


def draw_sample(dset: DecompositionSet, n: int, seed: int) -> RandomSample:
    """Draw n uniform assignments over {0,1}^d, reproducible from seed."""
    if n < 1:
        raise EstimationError(f"sample size must be at least 1, got {n}")
    rng = make_rng(seed)
    assignments = rng.integers(0, 2, size=(n, dset.d), dtype=np.uint8)
    return RandomSample(dset, seed, assignments)


def point_seed(root_seed: int, dset: DecompositionSet) -> int:
    """Sample seed for one decomposition set; depends only on the root seed and the set itself."""
    return derive_seed(root_seed, STREAM_SAMPLE, dset.width, *words32(dset.chi))

"""
Search space of decomposition sets: points, Hamming neighbourhoods and tabu lists.

A point is a subset of a fixed universe of variables, stored as an int whose bit i says whether
universe[i] is a member. Its hex form matches DecompositionSet.hex.
"""
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Set, Tuple

from satpart.estimator.decomposition import DecompositionSet
from satpart.utils.bits import Bits, bits_to_hex, hex_to_bits, lsb_bits, words32
from satpart.utils.exceptions import SearchError
from satpart.utils.seeding import STREAM_NEIGHBOR_ORDER, derive_seed, make_rng


@dataclass(frozen=True)
class SearchPoint:
    chi: int
    width: int

    def __post_init__(self):
        if self.width < 0 or self.chi < 0 or self.chi >> self.width:
            raise SearchError(f"point {self.chi:#x} does not fit a universe of width {self.width}")

    @classmethod
    def from_dset(cls, dset: DecompositionSet) -> "SearchPoint":
        return cls(dset.chi, dset.width)

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "SearchPoint":
        return cls(sum(1 << i for i, bit in enumerate(bits) if bit), len(bits))

    @classmethod
    def from_hex(cls, text: str, width: int) -> "SearchPoint":
        return cls.from_bits(hex_to_bits(text, width))

    @property
    def bits(self) -> Bits:
        return lsb_bits(self.chi, self.width)

    @property
    def hex(self) -> str:
        return bits_to_hex(self.bits)

    @property
    def size(self) -> int:
        return bin(self.chi).count("1")

    def members(self, universe: Sequence[int]) -> Tuple[int, ...]:
        return tuple(v for i, v in enumerate(universe) if (self.chi >> i) & 1)

    def dset(self, universe: Sequence[int]) -> DecompositionSet:
        if len(universe) != self.width:
            raise SearchError(f"universe of size {len(universe)} for point of width {self.width}")
        return DecompositionSet(tuple(universe), self.bits)

    def flip(self, positions: Sequence[int]) -> "SearchPoint":
        mask = 0
        for i in positions:
            mask |= 1 << i
        return SearchPoint(self.chi ^ mask, self.width)

    def distance(self, other: "SearchPoint") -> int:
        return bin(self.chi ^ other.chi).count("1")

    def sort_key(self) -> Bits:
        """Lexicographic order of the bit vector, universe[0] first."""
        return self.bits


@dataclass(frozen=True)
class NeighborhoodSpec:
    radius: int = 1

    def __post_init__(self):
        if self.radius < 1:
            raise SearchError(f"neighbourhood radius must be at least 1, got {self.radius}")


def neighborhood_size(width: int, radius: int) -> int:
    return sum(math.comb(width, r) for r in range(1, min(radius, width) + 1))


def ordered_neighbors(point: SearchPoint, radius: int) -> Iterator[SearchPoint]:
    """Points at distance 1..radius: by distance, then flipped positions in combinations order."""
    for r in range(1, min(radius, point.width) + 1):
        for positions in combinations(range(point.width), r):
            yield point.flip(positions)


def neighbors(
    point: SearchPoint, spec: NeighborhoodSpec = NeighborhoodSpec(), seed: Optional[int] = None
) -> List[SearchPoint]:
    """
    The neighbourhood N_radius(point).

    Without a seed the documented order of ordered_neighbors is returned. With a seed the same
    points come in a shuffled order that depends only on (seed, radius, point).
    """
    points = list(ordered_neighbors(point, spec.radius))
    if seed is not None:
        rng = make_rng(derive_seed(seed, STREAM_NEIGHBOR_ORDER, spec.radius, point.width, *words32(point.chi)))
        order = rng.permutation(len(points))
        points = [points[i] for i in order]
    return points


@dataclass
class TabuLists:
    """
    L1 holds evaluated points whose whole neighbourhood is evaluated, L2 the other evaluated
    points together with the neighbours already marked checked. Lists are unbounded.
    """
    width: int
    radius: int = 1
    l1: Set[SearchPoint] = field(default_factory=set)
    l2: Dict[SearchPoint, Set[SearchPoint]] = field(default_factory=dict)

    @property
    def neighborhood_size(self) -> int:
        return neighborhood_size(self.width, self.radius)

    def __contains__(self, point: SearchPoint) -> bool:
        return point in self.l1 or point in self.l2

    def __len__(self) -> int:
        return len(self.l1) + len(self.l2)

    def mark(self, point: SearchPoint) -> None:
        """Add a newly evaluated point to L2 and mark it checked in every L2 neighbourhood holding it."""
        if point in self:
            return
        full = self.neighborhood_size
        marks = {q for q in ordered_neighbors(point, self.radius) if q in self}
        self.l2[point] = marks
        for q in marks:
            q_marks = self.l2.get(q)
            if q_marks is not None:
                q_marks.add(point)
                if len(q_marks) == full:
                    del self.l2[q]
                    self.l1.add(q)
        if len(marks) == full:
            del self.l2[point]
            self.l1.add(point)

    def check_invariants(self) -> None:
        """Raise SearchError when L1/L2 bookkeeping is inconsistent."""
        full = self.neighborhood_size
        if self.l1.intersection(self.l2):
            raise SearchError("a point is in both tabu lists")
        for point in self.l1:
            if any(q not in self for q in ordered_neighbors(point, self.radius)):
                raise SearchError(f"L1 point {point.hex} has an unchecked neighbour")
        for point, marks in self.l2.items():
            expected = {q for q in ordered_neighbors(point, self.radius) if q in self}
            if marks != expected or len(marks) >= full:
                raise SearchError(f"L2 point {point.hex} carries inconsistent marks")


def center_activity(point: SearchPoint, universe: Sequence[int], activity: Mapping[int, float]) -> float:
    return math.fsum(activity.get(v, 0.0) for v in point.members(universe))


def get_new_center(l2: Sequence[SearchPoint], activity: Mapping[int, float], universe: Sequence[int]) -> SearchPoint:
    """Point of L2 with the largest total activity over its members; ties go to the smallest bit vector."""
    if not l2:
        raise SearchError("cannot choose a new centre from an empty L2")
    return min(l2, key=lambda p: (-center_activity(p, universe, activity), p.sort_key()))

"""
Decomposition sets.

A decomposition set is a member mask over a fixed ordered universe of candidate variables (the
starting set). Position i of the mask refers to universe[i].
"""
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Sequence, Tuple

from satpart.formula.cnf import PartialAssignment
from satpart.utils.bits import Bits, bits_to_hex, hex_to_bits, lsb_bits
from satpart.utils.exceptions import AssignmentError


@dataclass(frozen=True)
class DecompositionSet:
    universe: Tuple[int, ...]
    member_mask: Bits

    def __post_init__(self):
        universe = tuple(int(v) for v in self.universe)
        mask = tuple(1 if bit else 0 for bit in self.member_mask)
        if len(mask) != len(universe):
            raise AssignmentError(f"mask width {len(mask)} differs from universe size {len(universe)}")
        if any(v <= 0 for v in universe):
            raise AssignmentError("universe contains a non-positive variable index")
        if any(a >= b for a, b in zip(universe, universe[1:])):
            raise AssignmentError("universe indices must be strictly increasing")
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "member_mask", mask)

    @classmethod
    def full(cls, universe: Sequence[int]) -> "DecompositionSet":
        return cls(tuple(universe), (1,) * len(universe))

    @classmethod
    def of(cls, members: Iterable[int]) -> "DecompositionSet":
        """Decomposition set whose universe is exactly its members."""
        return cls.full(sorted(set(members)))

    @classmethod
    def from_members(cls, universe: Sequence[int], members: Iterable[int]) -> "DecompositionSet":
        chosen = set(members)
        unknown = chosen.difference(universe)
        if unknown:
            raise AssignmentError(f"variables {sorted(unknown)} are not in the universe")
        return cls(tuple(universe), tuple(1 if v in chosen else 0 for v in universe))

    @classmethod
    def from_chi(cls, universe: Sequence[int], chi: int) -> "DecompositionSet":
        return cls(tuple(universe), lsb_bits(chi, len(universe)))

    @property
    def width(self) -> int:
        return len(self.universe)

    @property
    def members(self) -> Tuple[int, ...]:
        return tuple(v for v, bit in zip(self.universe, self.member_mask) if bit)

    @property
    def d(self) -> int:
        return sum(self.member_mask)

    @property
    def chi(self) -> int:
        """Mask packed into an int, bit i for universe[i]."""
        return sum(1 << i for i, bit in enumerate(self.member_mask) if bit)

    @property
    def hex(self) -> str:
        return bits_to_hex(self.member_mask)

    def validate(self, var_count: int) -> None:
        if self.universe and self.universe[-1] > var_count:
            raise AssignmentError(f"universe variable {self.universe[-1]} beyond var_count {var_count}")

    def assignment(self, bits: Sequence[int]) -> PartialAssignment:
        """Bind members[j] to bits[j]."""
        return PartialAssignment.from_bits(self.members, [int(b) for b in bits])

    def to_dict(self) -> Dict[str, Any]:
        return {"universe": list(self.universe), "mask": self.hex}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DecompositionSet":
        universe = tuple(data["universe"])
        return cls(universe, hex_to_bits(data["mask"], len(universe)))

"""
Solver result and budget types.
"""
import threading
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple

METRICS = ("conflicts", "decisions", "propagations", "wall_seconds")


class SolveStatus(str, Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    BUDGET_EXCEEDED = "BUDGET_EXCEEDED"
    CANCELLED = "CANCELLED"

    @property
    def decided(self) -> bool:
        return self in (SolveStatus.SAT, SolveStatus.UNSAT)


class PropagationStatus(str, Enum):
    DECIDED_SAT = "DECIDED_SAT"
    DECIDED_UNSAT = "DECIDED_UNSAT"
    UNDECIDED = "UNDECIDED"

    @property
    def decided(self) -> bool:
        return self is not PropagationStatus.UNDECIDED


@dataclass(frozen=True)
class Cost:
    """Cost of one solver run. Everything except wall_seconds is exactly reproducible."""
    conflicts: int = 0
    decisions: int = 0
    propagations: int = 0
    wall_seconds: float = 0.0

    def value(self, metric: str) -> float:
        if metric not in METRICS:
            raise ValueError(f"unknown cost metric {metric!r}")
        return float(getattr(self, metric))

    def deterministic(self) -> Tuple[int, int, int]:
        return (self.conflicts, self.decisions, self.propagations)

    def to_dict(self) -> Dict[str, float]:
        return {
            "conflicts": self.conflicts,
            "decisions": self.decisions,
            "propagations": self.propagations,
            "wall_seconds": self.wall_seconds,
        }


@dataclass(frozen=True)
class Budget:
    """Resource limits of a single solve; cancel_signal may be set from any thread."""
    max_conflicts: Optional[int] = None
    max_wall_seconds: Optional[float] = None
    cancel_signal: threading.Event = field(default_factory=threading.Event, compare=False)

    @classmethod
    def unlimited(cls) -> "Budget":
        return cls()

    def with_cancel_signal(self, signal: threading.Event) -> "Budget":
        return replace(self, cancel_signal=signal)

    def fresh(self) -> "Budget":
        """Same limits, new cancel flag."""
        return replace(self, cancel_signal=threading.Event())

    def cancel(self) -> None:
        self.cancel_signal.set()

    @property
    def cancelled(self) -> bool:
        return self.cancel_signal.is_set()


@dataclass
class SolveOutcome:
    """Observable behaviour of one solve call."""
    status: SolveStatus
    cost: Cost
    model: Optional[Tuple[bool, ...]] = None
    activity: Dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if (self.model is not None) != (self.status is SolveStatus.SAT):
            raise ValueError("model must be present exactly when status is SAT")

    def value(self, var: int) -> bool:
        if self.model is None:
            raise ValueError("no model available")
        return self.model[var - 1]

    def model_literals(self) -> List[int]:
        if self.model is None:
            return []
        return [v if bit else -v for v, bit in enumerate(self.model, start=1)]


@dataclass(frozen=True)
class PropagationResult:
    """Outcome of unit propagation to fixpoint without decisions."""
    status: PropagationStatus
    implied: FrozenSet[int] = frozenset()
    propagations: int = 0

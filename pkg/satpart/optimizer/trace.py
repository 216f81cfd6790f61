"""
Search traces and their journal records.
"""
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from satpart.estimator.decomposition import DecompositionSet
from satpart.optimizer.evaluators import Evaluation
from satpart.orchestrator.journal import Journal, JournalState
from satpart.utils.exceptions import UsageError


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    chi: str
    f_value: float
    n: int
    censored_count: int
    accepted: bool
    center: Optional[str] = None
    temperature: Optional[float] = None
    best_f: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TraceRecord":
        names = cls.__dataclass_fields__.keys()
        return cls(**{key: value for key, value in data.items() if key in names})


class SearchTrace:
    """Ordered trace of one search; mirrored into a journal when one is attached."""

    def __init__(self, journal: Optional[Journal] = None):
        self.records: List[TraceRecord] = []
        self.journal = journal

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def start(self, algorithm: str, universe: Sequence[int], **fields: Any) -> None:
        if self.journal is not None:
            self.journal.append("run", mode="optimize", algorithm=algorithm, universe=list(universe), **fields)

    def record(
        self,
        evaluation: Evaluation,
        accepted: bool,
        best_f: float,
        center: Optional[str] = None,
        temperature: Optional[float] = None,
    ) -> TraceRecord:
        estimate = evaluation.estimate
        entry = TraceRecord(
            iteration=len(self.records),
            chi=evaluation.point.hex,
            f_value=estimate.f_value,
            n=estimate.n,
            censored_count=estimate.censored_count,
            accepted=accepted,
            center=center,
            temperature=temperature,
            best_f=best_f,
        )
        self.records.append(entry)
        if self.journal is not None:
            self.journal.append("trace", **entry.to_dict())
        return entry

    def finish(self, summary: Dict[str, Any]) -> None:
        if self.journal is not None:
            self.journal.append("summary", **summary)

    def best_values(self) -> List[float]:
        return [entry.best_f for entry in self.records if entry.best_f is not None]


def load_best_dset(path: Union[str, Path]) -> DecompositionSet:
    """
    Best decomposition set of an optimize journal.

    Uses the summary record when the search finished, otherwise the lowest-F trace record.

    Raises:
        UsageError: the journal holds no optimize run
    """
    state = JournalState.load(path)
    header = state.header or {}
    if header.get("mode") != "optimize":
        raise UsageError(f"{path} is not an optimize journal")
    universe = tuple(header["universe"])
    if state.summary is not None and "best_chi" in state.summary:
        mask = state.summary["best_chi"]
    elif state.traces:
        mask = min(state.traces, key=lambda record: (record["f_value"], record["iteration"]))["chi"]
    else:
        raise UsageError(f"{path} holds no evaluated points")
    return DecompositionSet.from_dict({"universe": list(universe), "mask": mask})


@dataclass
class SearchResult:
    """
    Outcome of a search.

    ``best`` is the lowest F seen; ``literal_best`` is the last accepted point, which for simulated
    annealing may be worse than ``best`` after uphill moves.
    """
    algorithm: str
    universe: Sequence[int]
    best: Evaluation
    literal_best: Evaluation
    trace: List[TraceRecord]
    evaluations: int
    reevaluations: int
    stop_reason: str
    budget_exhausted: bool = False
    lists: Optional[Any] = None

    @property
    def best_dset(self) -> DecompositionSet:
        return self.best.point.dset(self.universe)

    def summary(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "best_chi": self.best.point.hex,
            "best_f": self.best.f_value,
            "best_d": self.best.point.size,
            "evaluations": self.evaluations,
            "reevaluations": self.reevaluations,
            "stop_reason": self.stop_reason,
            "budget_exhausted": self.budget_exhausted,
        }

    def to_dict(self) -> Dict[str, Any]:
        data = self.summary()
        data.update(
            universe=list(self.universe),
            best_members=list(self.best.point.members(self.universe)),
            best_estimate=self.best.estimate.to_dict(),
            literal_best_chi=self.literal_best.point.hex,
            literal_best_f=self.literal_best.f_value,
            trace_length=len(self.trace),
        )
        if self.lists is not None:
            data.update(l1_size=len(self.lists.l1), l2_size=len(self.lists.l2))
        return data

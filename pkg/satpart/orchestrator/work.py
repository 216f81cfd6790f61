"""
Messages exchanged between the leader and the workers.
"""
import os
import time
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple, Union

from satpart.estimator.decomposition import DecompositionSet
from satpart.estimator.observation import Observation
from satpart.formula.cnf import Cnf
from satpart.solver.cdcl import PreparedFormula, SolverConfig, prepare, solve
from satpart.solver.outcome import Budget, SolveOutcome
from satpart.utils.bits import Bits


@dataclass(frozen=True)
class WorkItem:
    """One family member to solve; ``group`` selects the decomposition set in batched runs."""
    item_id: int
    assignment: Bits
    budget: Budget = field(default_factory=Budget)
    metric: str = "conflicts"
    group: int = 0


@dataclass(frozen=True)
class WorkResult:
    item_id: int
    observation: Observation
    worker_id: int
    started: float
    finished: float
    model: Optional[Tuple[bool, ...]] = None
    attempt: int = 0

    @property
    def wall_seconds(self) -> float:
        return self.finished - self.started


@dataclass
class SolveProgress:
    """Progress snapshot passed to the leader's progress callback."""
    total: int
    completed: int
    retried: int
    sat_found: int
    in_flight: int
    start_time: float

    @property
    def completion_percentage(self) -> float:
        if self.total == 0:
            return 100.0
        return self.completed / self.total * 100

    @property
    def elapsed_time(self) -> float:
        return time.time() - self.start_time


class SubproblemSolver:
    """Default worker body: solve C under the item's assignment as assumptions."""

    def __init__(
        self,
        cnf: Union[Cnf, PreparedFormula],
        dsets: Sequence[DecompositionSet],
        proof_dir: Optional[str] = None,
    ):
        self.formula = prepare(cnf)
        self.dsets = list(dsets)
        self.proof_dir = proof_dir

    def __call__(self, item: WorkItem, budget: Budget) -> SolveOutcome:
        dset = self.dsets[item.group]
        config = SolverConfig()
        if self.proof_dir:
            config = replace(config, proof_path=os.path.join(self.proof_dir, f"item-{item.group}-{item.item_id}.drat"))
        return solve(self.formula, dset.assignment(item.assignment), budget, config)

"""
Predictive-function evaluators used by the search algorithms.
"""
import time
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Union

from satpart.estimator.predictive import PredictiveEstimate
from satpart.estimator.sampling import point_seed
from satpart.formula.cnf import Cnf
from satpart.optimizer.search_space import SearchPoint
from satpart.orchestrator.pool import SolveFn
from satpart.orchestrator.runs import run_estimation_batch
from satpart.solver.cdcl import PreparedFormula, prepare
from satpart.solver.outcome import Budget
from satpart.utils.exceptions import SearchError


@dataclass
class Evaluation:
    point: SearchPoint
    estimate: PredictiveEstimate
    activity: Dict[int, float] = field(default_factory=dict, repr=False)

    @property
    def f_value(self) -> float:
        return self.estimate.f_value


@dataclass
class SearchBudget:
    """Stop condition of a search: evaluation count and/or wall time, both optional."""
    max_evaluations: Optional[int] = None
    max_wall_seconds: Optional[float] = None
    started: float = field(default_factory=time.monotonic)

    def restart(self) -> None:
        self.started = time.monotonic()

    def remaining(self, evaluations: int) -> Optional[int]:
        if self.max_evaluations is None:
            return None
        return max(0, self.max_evaluations - evaluations)

    def exceeded(self, evaluations: int) -> bool:
        if self.max_evaluations is not None and evaluations >= self.max_evaluations:
            return True
        if self.max_wall_seconds is not None and time.monotonic() - self.started >= self.max_wall_seconds:
            return True
        return False


class Evaluator(ABC):
    """Computes F for points of one universe and counts how often each point was evaluated."""

    def __init__(self, universe: Sequence[int]):
        self.universe = tuple(universe)
        self.counts: Counter = Counter()

    @property
    def width(self) -> int:
        return len(self.universe)

    @property
    def evaluations(self) -> int:
        return sum(self.counts.values())

    @property
    def reevaluations(self) -> int:
        return sum(count - 1 for count in self.counts.values() if count > 1)

    def evaluate(self, point: SearchPoint) -> Evaluation:
        return self.evaluate_many([point])[0]

    def evaluate_many(self, points: Sequence[SearchPoint]) -> List[Evaluation]:
        for point in points:
            if point.width != self.width:
                raise SearchError(f"point of width {point.width} for universe of size {self.width}")
        results = self._evaluate(points)
        self.counts.update(point.chi for point in points)
        return results

    @abstractmethod
    def _evaluate(self, points: Sequence[SearchPoint]) -> List[Evaluation]:
        ...


class EstimationEvaluator(Evaluator):
    """
    Monte Carlo F through the worker pool.

    Each point gets its own sample seed derived from (seed, point), so F(point) does not depend on
    when the search visits it. A batch of points shares one pool run.
    """

    def __init__(
        self,
        cnf: Union[Cnf, PreparedFormula],
        universe: Sequence[int],
        sample_size: int,
        seed: int,
        budget: Optional[Budget] = None,
        workers: int = 1,
        metric: str = "conflicts",
        gamma: float = 0.95,
        convention: str = "one_sided",
        solve_fn: Optional[SolveFn] = None,
        max_retries: int = 2,
    ):
        super().__init__(universe)
        self.formula = prepare(cnf)
        self.sample_size = sample_size
        self.seed = seed
        self.budget = budget
        self.workers = workers
        self.metric = metric
        self.gamma = gamma
        self.convention = convention
        self.solve_fn = solve_fn
        self.max_retries = max_retries

    def _evaluate(self, points: Sequence[SearchPoint]) -> List[Evaluation]:
        dsets = [point.dset(self.universe) for point in points]
        runs = run_estimation_batch(
            self.formula,
            dsets,
            self.sample_size,
            [point_seed(self.seed, dset) for dset in dsets],
            budget=self.budget,
            workers=self.workers,
            metric=self.metric,
            gamma=self.gamma,
            convention=self.convention,
            activity_vars=self.universe,
            solve_fn=self.solve_fn,
            max_retries=self.max_retries,
        )
        return [Evaluation(point, run.estimate, run.activity) for point, run in zip(points, runs)]


class FunctionEvaluator(Evaluator):
    """Exact F from a cost function of the point, for synthetic landscapes."""

    def __init__(
        self,
        universe: Sequence[int],
        cost: Callable[[SearchPoint], float],
        activity: Optional[Callable[[SearchPoint], Mapping[int, float]]] = None,
    ):
        super().__init__(universe)
        self.cost = cost
        self.activity = activity

    def _evaluate(self, points: Sequence[SearchPoint]) -> List[Evaluation]:
        results = []
        for point in points:
            estimate = PredictiveEstimate.exact(self.cost(point), point.size, metric="synthetic")
            activity = dict(self.activity(point)) if self.activity else {}
            results.append(Evaluation(point, estimate, activity))
        return results


def planted_cost(optimum: SearchPoint, base: float = 1.0, slope: float = 3.0) -> Callable[[SearchPoint], float]:
    """Synthetic landscape with a unique minimum at `optimum`: base + slope * distance."""
    def cost(point: SearchPoint) -> float:
        return base + slope * point.distance(optimum)
    return cost

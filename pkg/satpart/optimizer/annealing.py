"""
Simulated annealing over decomposition sets.
"""
import math
from dataclasses import dataclass
from typing import Dict, Optional, Set, Tuple

from monitoring import get_logger, log_run_metric, track_errors
from satpart.optimizer.evaluators import Evaluation, Evaluator, SearchBudget
from satpart.optimizer.search_space import NeighborhoodSpec, SearchPoint, neighborhood_size, neighbors
from satpart.optimizer.trace import SearchResult, SearchTrace
from satpart.orchestrator.journal import Journal
from satpart.utils.exceptions import SearchError
from satpart.utils.seeding import STREAM_ACCEPTANCE, derive_seed, make_rng

logger = get_logger(__name__)

COOLING_MODES = ("per_evaluation", "per_transition")


@dataclass(frozen=True)
class AnnealingSchedule:
    """
    Geometric cooling T_i = q_mult * T_(i-1), stopping below t_inf.

    Unset t0 resolves to F(start) / 10 (1.0 when F(start) is 0); unset t_inf to t0 * 1e-4.
    """
    t0: Optional[float] = None
    q_mult: float = 0.98
    t_inf: Optional[float] = None
    cooling: str = "per_evaluation"

    def __post_init__(self):
        if not 0.0 < self.q_mult < 1.0:
            raise SearchError(f"cooling multiplier must lie in (0, 1), got {self.q_mult}")
        if self.t0 is not None and self.t0 <= 0:
            raise SearchError(f"initial temperature must be positive, got {self.t0}")
        if self.t_inf is not None and self.t_inf <= 0:
            raise SearchError(f"final temperature must be positive, got {self.t_inf}")
        if self.t0 is not None and self.t_inf is not None and self.t_inf >= self.t0:
            raise SearchError("final temperature must be below the initial temperature")
        if self.cooling not in COOLING_MODES:
            raise SearchError(f"unknown cooling mode {self.cooling!r}")

    def resolve(self, f_start: float) -> Tuple[float, float]:
        t0 = self.t0
        if t0 is None:
            t0 = f_start / 10.0 if f_start > 0 else 1.0
        t_inf = self.t_inf if self.t_inf is not None else t0 * 1e-4
        if t_inf >= t0:
            raise SearchError(f"final temperature {t_inf} is not below initial temperature {t0}")
        return t0, t_inf


def sa_accept(f_candidate: float, f_current: float, temperature: float, unit_random: float) -> bool:
    """Metropolis rule: always take improvements, take a worse point with probability exp(-delta/T)."""
    if f_candidate < f_current:
        return True
    if temperature <= 0:
        return f_candidate <= f_current
    return unit_random < math.exp(-(f_candidate - f_current) / temperature)


@track_errors("simulated_annealing")
def simulated_annealing(
    evaluator: Evaluator,
    start: SearchPoint,
    schedule: AnnealingSchedule = AnnealingSchedule(),
    budget: Optional[SearchBudget] = None,
    seed: int = 0,
    radius: int = 1,
    journal: Optional[Journal] = None,
) -> SearchResult:
    """
    Minimise F by simulated annealing from `start`.

    Candidates are the unchecked points of N_rho(center) in seeded order. Acceptance moves the
    centre and resets rho to its starting value; a fully checked neighbourhood without acceptance
    grows rho. The search stops when the temperature drops below t_inf or the budget runs out, and
    also once rho exceeds the universe width.

    Returns:
        SearchResult whose ``best`` is the lowest F seen and ``literal_best`` the last accepted point
    """
    NeighborhoodSpec(radius)
    budget = budget or SearchBudget()
    budget.restart()
    width = start.width
    rng = make_rng(derive_seed(seed, STREAM_ACCEPTANCE))
    trace = SearchTrace(journal)
    trace.start("annealing", evaluator.universe, seed=seed, q_mult=schedule.q_mult, cooling=schedule.cooling)

    first = evaluator.evaluate(start)
    cache: Dict[SearchPoint, Evaluation] = {start: first}
    t0, t_inf = schedule.resolve(first.f_value)
    temperature = t0
    current = best = first
    trace.record(first, True, best.f_value, temperature=temperature)

    rho = radius
    checked: Set[SearchPoint] = set()
    stop_reason = ""
    while True:
        if temperature < t_inf:
            stop_reason = "temperature"
            break
        if budget.exceeded(evaluator.evaluations):
            stop_reason = "budget"
            break
        if rho > width:
            stop_reason = "space_exhausted"
            break
        if len(checked) >= neighborhood_size(width, rho):
            rho += 1
            continue
        candidate = next(p for p in neighbors(current.point, NeighborhoodSpec(rho), seed) if p not in checked)
        checked.add(candidate)
        evaluation = cache.get(candidate)
        if evaluation is None:
            evaluation = evaluator.evaluate(candidate)
            cache[candidate] = evaluation

        uphill = evaluation.f_value >= current.f_value
        accepted = sa_accept(evaluation.f_value, current.f_value, temperature, rng.random() if uphill else 0.0)
        center = current.point.hex
        if accepted:
            current = evaluation
            checked = set()
            rho = radius
            if evaluation.f_value < best.f_value:
                best = evaluation
        trace.record(evaluation, accepted, best.f_value, center=center, temperature=temperature)
        if accepted or schedule.cooling == "per_evaluation":
            temperature *= schedule.q_mult

    result = SearchResult(
        algorithm="annealing",
        universe=evaluator.universe,
        best=best,
        literal_best=current,
        trace=trace.records,
        evaluations=evaluator.evaluations,
        reevaluations=evaluator.reevaluations,
        stop_reason=stop_reason,
        budget_exhausted=stop_reason == "budget",
    )
    trace.finish(result.summary())
    logger.info(
        "Annealing finished",
        best_f=best.f_value,
        best_d=best.point.size,
        evaluations=result.evaluations,
        stop_reason=stop_reason,
    )
    log_run_metric("search.best_f", best.f_value, {"algorithm": "annealing"})
    return result

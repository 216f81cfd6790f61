"""
Tabu search over decomposition sets.
"""
from typing import Dict, Optional

from monitoring import get_logger, log_run_metric, track_errors
from satpart.optimizer.evaluators import Evaluation, Evaluator, SearchBudget
from satpart.optimizer.search_space import NeighborhoodSpec, SearchPoint, TabuLists, get_new_center, neighbors
from satpart.optimizer.trace import SearchResult, SearchTrace
from satpart.orchestrator.journal import Journal

logger = get_logger(__name__)


@track_errors("tabu_search")
def tabu_search(
    evaluator: Evaluator,
    start: SearchPoint,
    budget: Optional[SearchBudget] = None,
    seed: int = 0,
    radius: int = 1,
    journal: Optional[Journal] = None,
) -> SearchResult:
    """
    Minimise F by tabu search from `start`.

    Each iteration evaluates every not yet evaluated point of N_rho(center) in one batch. If the
    best value improved the search recentres on the best point, otherwise on the L2 point with
    the highest total conflict activity measured at the current centre. No point is evaluated
    twice. The search stops when L2 is empty or the budget runs out.
    """
    spec = NeighborhoodSpec(radius)
    budget = budget or SearchBudget()
    budget.restart()
    lists = TabuLists(start.width, radius)
    trace = SearchTrace(journal)
    trace.start("tabu", evaluator.universe, seed=seed, radius=radius)

    first = evaluator.evaluate(start)
    cache: Dict[SearchPoint, Evaluation] = {start: first}
    lists.mark(start)
    best = center = first
    trace.record(first, True, best.f_value)

    stop_reason = ""
    while True:
        if not lists.l2:
            stop_reason = "l2_empty"
            break
        if budget.exceeded(evaluator.evaluations):
            stop_reason = "budget"
            break
        pending = [p for p in neighbors(center.point, spec, seed) if p not in cache]
        remaining = budget.remaining(evaluator.evaluations)
        if remaining is not None:
            pending = pending[:remaining]
        improved = False
        if pending:
            for evaluation in evaluator.evaluate_many(pending):
                cache[evaluation.point] = evaluation
                lists.mark(evaluation.point)
                better = evaluation.f_value < best.f_value
                if better:
                    best = evaluation
                    improved = True
                trace.record(evaluation, better, best.f_value, center=center.point.hex)
        if improved:
            center = best
        elif lists.l2:
            center = cache[get_new_center(sorted(lists.l2, key=SearchPoint.sort_key), center.activity, evaluator.universe)]
            logger.debug("Recentred by activity", center=center.point.hex, l2=len(lists.l2))

    result = SearchResult(
        algorithm="tabu",
        universe=evaluator.universe,
        best=best,
        literal_best=best,
        trace=trace.records,
        evaluations=evaluator.evaluations,
        reevaluations=evaluator.reevaluations,
        stop_reason=stop_reason,
        budget_exhausted=stop_reason == "budget",
        lists=lists,
    )
    trace.finish(result.summary())
    logger.info(
        "Tabu search finished",
        best_f=best.f_value,
        best_d=best.point.size,
        evaluations=result.evaluations,
        l1=len(lists.l1),
        l2=len(lists.l2),
        stop_reason=stop_reason,
    )
    log_run_metric("search.best_f", best.f_value, {"algorithm": "tabu"})
    return result

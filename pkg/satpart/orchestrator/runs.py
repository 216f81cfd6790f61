"""
Leader entry points: Monte Carlo estimation and full decomposition-family solving.
"""
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Collection, Dict, Iterator, List, Optional, Sequence, Set, Tuple, Union

from monitoring import get_logger, log_run_metric, track_errors
from satpart.estimator.decomposition import DecompositionSet
from satpart.estimator.exact import DEFAULT_ENUMERATION_CAP, check_enumeration_cap
from satpart.estimator.observation import Observation, canonical_metric
from satpart.estimator.predictive import ObservationAccumulator, PredictiveEstimate
from satpart.estimator.sampling import draw_sample
from satpart.formula.cnf import Cnf
from satpart.formula.dimacs import fingerprint
from satpart.orchestrator.journal import Journal, JournalState
from satpart.orchestrator.pool import SolveFn, WorkerPool
from satpart.orchestrator.work import SolveProgress, SubproblemSolver, WorkItem, WorkResult
from satpart.solver.cdcl import PreparedFormula, prepare
from satpart.solver.outcome import Budget, Cost, SolveStatus
from satpart.utils.bits import bits_to_hex, gray_code, hex_to_bits, lsb_bits
from satpart.utils.exceptions import EstimationError, OrchestratorError

logger = get_logger(__name__)


@dataclass
class EstimationRun:
    """Predictive estimate of one decomposition set plus the data the search heuristics need."""
    dset: DecompositionSet
    seed: int
    estimate: PredictiveEstimate
    activity: Dict[int, float] = field(default_factory=dict, repr=False)
    observations: List[Observation] = field(default_factory=list, repr=False)


def _as_cnf(cnf: Union[Cnf, PreparedFormula]) -> Cnf:
    return cnf.cnf if isinstance(cnf, PreparedFormula) else cnf


def run_estimation_batch(
    cnf: Union[Cnf, PreparedFormula],
    dsets: Sequence[DecompositionSet],
    n: int,
    seeds: Sequence[int],
    budget: Optional[Budget] = None,
    workers: int = 1,
    metric: str = "conflicts",
    gamma: float = 0.95,
    convention: str = "one_sided",
    activity_vars: Optional[Collection[int]] = None,
    journal: Optional[Journal] = None,
    solve_fn: Optional[SolveFn] = None,
    max_retries: int = 2,
) -> List[EstimationRun]:
    """
    Estimate F for several decomposition sets on one worker pool.

    Item ids are ``group * n + j`` for the j-th sample member of the group-th set, so results are
    aggregated into per-set accumulators regardless of completion order.

    Raises:
        EstimationError: seeds and dsets differ in length, or n < 1
        OrchestratorError: an item kept failing
    """
    if len(seeds) != len(dsets):
        raise EstimationError(f"{len(dsets)} decomposition sets but {len(seeds)} seeds")
    if not dsets:
        return []
    metric = canonical_metric(metric)
    formula = prepare(cnf)
    for dset in dsets:
        dset.validate(formula.var_count)
    samples = [draw_sample(dset, n, seed) for dset, seed in zip(dsets, seeds)]
    budget = budget or Budget()
    solver = solve_fn or SubproblemSolver(formula, dsets)

    def items() -> Iterator[WorkItem]:
        for group, sample in enumerate(samples):
            for j, assignment in enumerate(sample):
                yield WorkItem(group * n + j, assignment, budget, metric, group)

    collected: List[Dict[int, Observation]] = [{} for _ in dsets]

    def on_result(result: WorkResult) -> bool:
        group, j = divmod(result.item_id, n)
        collected[group][j] = result.observation
        if journal is not None:
            journal.append(
                "item", item_id=result.item_id, group=group, worker_id=result.worker_id, **result.observation.to_dict()
            )
        return False

    pool = WorkerPool(workers, solver, max_retries=max_retries)
    pool.run(items(), on_result, total=n * len(dsets), activity_vars=activity_vars)

    runs: List[EstimationRun] = []
    for group, (dset, seed) in enumerate(zip(dsets, seeds)):
        observations = [collected[group][j] for j in sorted(collected[group])]
        accumulator = ObservationAccumulator(dset.d, metric)
        accumulator.extend(observations)
        estimate = accumulator.estimate(gamma, convention)
        if journal is not None:
            journal.append("estimate", group=group, seed=seed, dset=dset.to_dict(), **estimate.to_dict())
        if not estimate.valid:
            logger.warning("Every observation was censored", dset=dset.hex, n=n)
        runs.append(EstimationRun(dset, seed, estimate, accumulator.mean_activity(), observations))
    return runs


@track_errors("run_estimation")
def run_estimation(
    cnf: Union[Cnf, PreparedFormula],
    dset: DecompositionSet,
    n: int,
    seed: int,
    budget: Optional[Budget] = None,
    workers: int = 1,
    metric: str = "conflicts",
    gamma: float = 0.95,
    convention: str = "one_sided",
    journal: Optional[Journal] = None,
    solve_fn: Optional[SolveFn] = None,
    max_retries: int = 2,
) -> PredictiveEstimate:
    """
    Draw a random sample of the family, solve it on the pool and compute the predictive function.

    The result does not depend on the worker count: observations are keyed by sample position.
    """
    started = time.time()
    if journal is not None:
        journal.append(
            "run",
            mode="estimate",
            fingerprint=fingerprint(_as_cnf(cnf)),
            dset=dset.to_dict(),
            metric=canonical_metric(metric),
            n=n,
            seed=seed,
        )
    run = run_estimation_batch(
        cnf, [dset], n, [seed], budget, workers, metric, gamma, convention,
        journal=journal, solve_fn=solve_fn, max_retries=max_retries,
    )[0]
    logger.info(
        "Estimation finished",
        f_value=run.estimate.f_value,
        d=dset.d,
        n=n,
        censored=run.estimate.censored_count,
        seconds=round(time.time() - started, 3),
    )
    log_run_metric("estimate.f_value", run.estimate.f_value, {"d": dset.d, "metric": run.estimate.metric})
    return run.estimate


@dataclass
class SolveRunReport:
    """Outcome of solving a decomposition family; costs are the one-core (sequential) view."""
    dset: DecompositionSet
    total: int
    completed_ids: Tuple[int, ...] = ()
    sat_items: Tuple[int, ...] = ()
    sat_models: Tuple[Tuple[bool, ...], ...] = ()
    item_costs: Dict[int, Cost] = field(default_factory=dict, repr=False)
    undecided: Tuple[int, ...] = ()
    elapsed: float = 0.0
    workers: int = 1
    stop_on_sat: bool = True
    stopped_early: bool = False
    metric: str = "conflicts"

    @property
    def completed(self) -> int:
        return len(self.completed_ids)

    @property
    def satisfiable(self) -> bool:
        return bool(self.sat_models)

    @property
    def exhausted(self) -> bool:
        """Every family member was decided, so an empty model list proves unsatisfiability."""
        return self.completed == self.total and not self.undecided

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dset": self.dset.to_dict(),
            "d": self.dset.d,
            "total": self.total,
            "completed": self.completed,
            "completed_ids": list(self.completed_ids),
            "sat_items": list(self.sat_items),
            "sat_models": [bits_to_hex([int(bit) for bit in model]) for model in self.sat_models],
            "var_count": len(self.sat_models[0]) if self.sat_models else 0,
            "undecided": list(self.undecided),
            "item_costs": {str(item_id): cost.to_dict() for item_id, cost in sorted(self.item_costs.items())},
            "one_core_cost": aggregate_one_core_cost(self, self.metric),
            "elapsed": self.elapsed,
            "workers": self.workers,
            "stop_on_sat": self.stop_on_sat,
            "stopped_early": self.stopped_early,
            "metric": self.metric,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SolveRunReport":
        var_count = int(data.get("var_count", 0))
        return cls(
            dset=DecompositionSet.from_dict(data["dset"]),
            total=int(data["total"]),
            completed_ids=tuple(data["completed_ids"]),
            sat_items=tuple(data["sat_items"]),
            sat_models=tuple(tuple(bool(b) for b in hex_to_bits(text, var_count)) for text in data["sat_models"]),
            item_costs={int(k): _cost_from_fields(v) for k, v in data.get("item_costs", {}).items()},
            undecided=tuple(data.get("undecided", ())),
            elapsed=float(data.get("elapsed", 0.0)),
            workers=int(data.get("workers", 1)),
            stop_on_sat=bool(data.get("stop_on_sat", True)),
            stopped_early=bool(data.get("stopped_early", False)),
            metric=data.get("metric", "conflicts"),
        )


def _cost_from_fields(data: Dict[str, Any]) -> Cost:
    return Cost(
        int(data.get("conflicts", 0)),
        int(data.get("decisions", 0)),
        int(data.get("propagations", 0)),
        float(data.get("wall_seconds", 0.0)),
    )


def aggregate_one_core_cost(report: SolveRunReport, metric: Optional[str] = None) -> float:
    """Sum of per-item costs, i.e. the time one core would need for the processed items."""
    name = canonical_metric(metric or report.metric)
    return math.fsum(cost.value(name) for cost in report.item_costs.values())


def family_items(dset: DecompositionSet, budget: Budget, metric: str, skip: Collection[int] = ()) -> Iterator[WorkItem]:
    """Family members in Gray-code order: item k binds members[j] to bit j of gray(k)."""
    for k in range(1 << dset.d):
        if k not in skip:
            yield WorkItem(k, lsb_bits(gray_code(k), dset.d), budget, metric)


def _resume_state(journal: Journal, cnf: Cnf, dset: DecompositionSet) -> Optional[JournalState]:
    records = journal.open()
    if not records:
        return None
    state = JournalState.replay(records)
    header = state.header or {}
    if header.get("fingerprint") != fingerprint(cnf):
        raise OrchestratorError(f"journal {journal.path} was written for a different formula")
    if header.get("dset") != dset.to_dict():
        raise OrchestratorError(f"journal {journal.path} was written for a different decomposition set")
    return state


@track_errors("run_solving")
def run_solving(
    cnf: Union[Cnf, PreparedFormula],
    dset: DecompositionSet,
    workers: int = 1,
    stop_on_sat: bool = True,
    checkpoint_path: Optional[Union[str, Path]] = None,
    budget: Optional[Budget] = None,
    metric: str = "conflicts",
    cap: int = DEFAULT_ENUMERATION_CAP,
    max_retries: int = 2,
    solve_fn: Optional[SolveFn] = None,
    progress_callback: Optional[Callable[[SolveProgress], None]] = None,
    proof_dir: Optional[str] = None,
) -> SolveRunReport:
    """
    Solve all 2^d members of the decomposition family.

    Every completed item is journaled; an existing journal at checkpoint_path is resumed, skipping
    items already recorded there. Cancelled items are not journaled and are solved again on resume.

    Raises:
        EnumerationCapExceeded: d is larger than cap
        CheckpointCorruptedError: the journal failed its checksums
        OrchestratorError: the journal belongs to another formula or set, or an item kept failing
    """
    check_enumeration_cap(dset.d, cap)
    metric = canonical_metric(metric)
    formula = prepare(cnf)
    dset.validate(formula.var_count)
    total = 1 << dset.d
    budget = budget or Budget()
    started = time.time()

    completed: Dict[int, Cost] = {}
    sat_items: Dict[int, Tuple[bool, ...]] = {}
    undecided: Set[int] = set()

    def remember(item_id: int, status: SolveStatus, cost: Cost, model: Optional[Tuple[bool, ...]]) -> None:
        completed[item_id] = cost
        if status is SolveStatus.SAT and model is not None:
            sat_items[item_id] = model
        elif not status.decided:
            undecided.add(item_id)

    journal = Journal(checkpoint_path) if checkpoint_path else None
    try:
        if journal is not None:
            state = _resume_state(journal, formula.cnf, dset)
            if state is None:
                journal.append(
                    "run", mode="solve", fingerprint=fingerprint(formula.cnf), dset=dset.to_dict(), metric=metric, total=total
                )
            else:
                for item_id, record in state.items.items():
                    model = None
                    if record.get("model"):
                        model = tuple(bool(b) for b in hex_to_bits(record["model"], formula.var_count))
                    remember(item_id, SolveStatus(record["status"]), _cost_from_fields(record), model)
                logger.info("Resuming from journal", path=str(journal.path), completed=len(completed), total=total)

        stopped_early = False
        if not (stop_on_sat and sat_items):
            solver = solve_fn or SubproblemSolver(formula, [dset], proof_dir)

            def on_result(result: WorkResult) -> bool:
                observation = result.observation
                if observation.status is SolveStatus.CANCELLED:
                    return False
                remember(result.item_id, observation.status, observation.cost, result.model)
                if journal is not None:
                    fields = dict(item_id=result.item_id, group=0, worker_id=result.worker_id, **observation.to_dict())
                    if result.model is not None:
                        fields["model"] = bits_to_hex([int(bit) for bit in result.model])
                    journal.append("item", **fields)
                if observation.status is SolveStatus.SAT:
                    logger.info("Satisfying assignment found", item_id=result.item_id)
                    return stop_on_sat
                return False

            stats = WorkerPool(workers, solver, max_retries=max_retries).run(
                family_items(dset, budget, metric, skip=set(completed)),
                on_result,
                total=total - len(completed),
                progress_callback=progress_callback,
            )
            stopped_early = stats.stopped_early

        report = SolveRunReport(
            dset=dset,
            total=total,
            completed_ids=tuple(sorted(completed)),
            sat_items=tuple(sorted(sat_items)),
            sat_models=tuple(sat_items[i] for i in sorted(sat_items)),
            item_costs=completed,
            undecided=tuple(sorted(undecided)),
            elapsed=time.time() - started,
            workers=workers,
            stop_on_sat=stop_on_sat,
            stopped_early=stopped_early or (stop_on_sat and bool(sat_items) and len(completed) < total),
            metric=metric,
        )
        if journal is not None:
            journal.append(
                "summary",
                completed=report.completed,
                total=total,
                sat_items=list(report.sat_items),
                undecided=len(report.undecided),
                one_core_cost=aggregate_one_core_cost(report),
                metric=metric,
            )
    finally:
        if journal is not None:
            journal.close()

    logger.info(
        "Solving finished",
        d=dset.d,
        completed=report.completed,
        total=total,
        sat=len(report.sat_models),
        undecided=len(report.undecided),
        seconds=round(report.elapsed, 3),
    )
    log_run_metric("solve.one_core_cost", aggregate_one_core_cost(report), {"d": dset.d, "metric": metric})
    return report

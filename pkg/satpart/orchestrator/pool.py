"""
Thread-based leader/worker pool.

The leader (the thread calling ``WorkerPool.run``) owns dispatch, retries and deduplication.
Workers only see WorkItems and return outcomes through the result queue. Each dispatched item
carries its own cancel flag, which is the only state shared with a running solve.
"""
import queue
import threading
import time
from dataclasses import dataclass
from typing import Callable, Collection, Dict, Iterable, Iterator, Optional, Set

from monitoring import get_logger
from satpart.estimator.observation import Observation
from satpart.orchestrator.work import SolveProgress, WorkItem, WorkResult
from satpart.solver.outcome import Budget, SolveOutcome, SolveStatus
from satpart.utils.exceptions import OrchestratorError

logger = get_logger(__name__)

SolveFn = Callable[[WorkItem, Budget], SolveOutcome]

_STOP = None


@dataclass
class PoolStats:
    dispatched: int = 0
    delivered: int = 0
    retried: int = 0
    duplicates: int = 0
    cancelled: int = 0
    stopped_early: bool = False


class WorkerPool:
    """Solve WorkItems on `workers` threads with re-dispatch of failed items."""

    def __init__(self, workers: int, solve_fn: SolveFn, max_retries: int = 2, window: Optional[int] = None):
        """
        Initialize worker pool.

        Args:
            workers: number of worker threads (at least 1)
            solve_fn: worker body, called as solve_fn(item, budget)
            max_retries: re-dispatch attempts for an item whose worker raised
            window: maximum items in flight (default 2 * workers)
        """
        if workers < 1:
            raise OrchestratorError(f"worker count must be at least 1, got {workers}")
        self.workers = workers
        self.solve_fn = solve_fn
        self.max_retries = max_retries
        self.window = window or 2 * workers
        self._cancel_flags: Dict[int, threading.Event] = {}
        self._stop_requested = threading.Event()
        self._flags_lock = threading.Lock()

    def request_stop(self) -> None:
        """Stop feeding and cancel every in-flight item; safe from any thread."""
        self._stop_requested.set()
        self._cancel_all()

    def _cancel_all(self) -> None:
        with self._flags_lock:
            flags = list(self._cancel_flags.values())
        for flag in flags:
            flag.set()

    def _worker_loop(self, worker_id: int, tasks: queue.Queue, results: queue.Queue) -> None:
        while True:
            task = tasks.get()
            if task is _STOP:
                return
            item, attempt, budget = task
            started = time.time()
            try:
                outcome = self.solve_fn(item, budget)
                results.put((item, attempt, outcome, None, worker_id, started, time.time()))
            except Exception as e:  # re-dispatched by the leader
                results.put((item, attempt, None, e, worker_id, started, time.time()))

    def run(
        self,
        items: Iterable[WorkItem],
        on_result: Callable[[WorkResult], Optional[bool]],
        total: Optional[int] = None,
        progress_callback: Optional[Callable[[SolveProgress], None]] = None,
        activity_vars: Optional[Collection[int]] = None,
    ) -> PoolStats:
        """
        Dispatch items lazily and deliver each result exactly once to on_result.

        on_result returning True stops the run: no further items are dispatched and in-flight
        items are cancelled. Results of cancelled items are still delivered.

        Raises:
            OrchestratorError: an item failed more than max_retries times
        """
        self._stop_requested.clear()
        tasks: queue.Queue = queue.Queue()
        results: queue.Queue = queue.Queue()
        threads = [
            threading.Thread(target=self._worker_loop, args=(i, tasks, results), name=f"satpart-worker-{i}", daemon=True)
            for i in range(self.workers)
        ]
        for thread in threads:
            thread.start()

        stats = PoolStats()
        source: Iterator[WorkItem] = iter(items)
        exhausted = False
        in_flight: Dict[int, WorkItem] = {}
        seen: Set[int] = set()
        attempts: Dict[int, int] = {}
        sat_found = 0
        start_time = time.time()

        def dispatch(item: WorkItem, attempt: int) -> None:
            budget = item.budget.fresh()
            with self._flags_lock:
                self._cancel_flags[item.item_id] = budget.cancel_signal
            if self._stop_requested.is_set():
                budget.cancel()
            in_flight[item.item_id] = item
            tasks.put((item, attempt, budget))
            stats.dispatched += 1

        try:
            while True:
                while not exhausted and not self._stop_requested.is_set() and len(in_flight) < self.window:
                    item = next(source, None)
                    if item is None:
                        exhausted = True
                        break
                    if item.item_id in seen or item.item_id in in_flight:
                        stats.duplicates += 1
                        continue
                    dispatch(item, 0)
                if not in_flight:
                    break

                item, attempt, outcome, error, worker_id, started, finished = results.get()
                if error is not None:
                    tries = attempts.get(item.item_id, 0) + 1
                    attempts[item.item_id] = tries
                    logger.warning("Worker failed on item", item_id=item.item_id, attempt=tries, error=str(error))
                    del in_flight[item.item_id]
                    if tries > self.max_retries:
                        raise OrchestratorError(f"item {item.item_id} failed {tries} times: {error}") from error
                    stats.retried += 1
                    dispatch(item, tries)
                    continue

                del in_flight[item.item_id]
                with self._flags_lock:
                    self._cancel_flags.pop(item.item_id, None)
                if item.item_id in seen:
                    stats.duplicates += 1
                    continue
                seen.add(item.item_id)
                if outcome.status is SolveStatus.CANCELLED:
                    stats.cancelled += 1
                if outcome.status is SolveStatus.SAT:
                    sat_found += 1

                observation = Observation.from_outcome(item.assignment, outcome, item.metric, item.budget, activity_vars)
                result = WorkResult(item.item_id, observation, worker_id, started, finished, outcome.model, attempt)
                stats.delivered += 1
                if on_result(result) and not self._stop_requested.is_set():
                    stats.stopped_early = True
                    logger.info("Leader requested stop", item_id=item.item_id, in_flight=len(in_flight))
                    self.request_stop()

                if progress_callback:
                    progress = SolveProgress(
                        total=total if total is not None else stats.dispatched,
                        completed=stats.delivered,
                        retried=stats.retried,
                        sat_found=sat_found,
                        in_flight=len(in_flight),
                        start_time=start_time,
                    )
                    try:
                        progress_callback(progress)
                    except Exception as e:
                        logger.error("Error in progress callback", error=str(e))
        finally:
            self._cancel_all()
            for _ in threads:
                tasks.put(_STOP)
            for thread in threads:
                thread.join()
            with self._flags_lock:
                self._cancel_flags.clear()

        if self._stop_requested.is_set():
            stats.stopped_early = True
        return stats


"""
Leader/worker execution of decomposition families with a checksummed journal.
"""

from .journal import Journal, JournalState, read_journal, record_checksum
from .pool import PoolStats, WorkerPool
from .runs import (
    EstimationRun,
    SolveRunReport,
    aggregate_one_core_cost,
    family_items,
    run_estimation,
    run_estimation_batch,
    run_solving,
)
from .work import SolveProgress, SubproblemSolver, WorkItem, WorkResult

__all__ = [
    "Journal",
    "JournalState",
    "read_journal",
    "record_checksum",
    "PoolStats",
    "WorkerPool",
    "EstimationRun",
    "SolveRunReport",
    "aggregate_one_core_cost",
    "family_items",
    "run_estimation",
    "run_estimation_batch",
    "run_solving",
    "SolveProgress",
    "SubproblemSolver",
    "WorkItem",
    "WorkResult",
]

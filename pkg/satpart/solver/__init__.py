"""
Deterministic CDCL solving, unit propagation and model checking.
"""

from .cdcl import CANCEL_CHECK_INTERVAL, DEFAULT_CONFIG, CdclSolver, PreparedFormula, SolverConfig, luby, prepare, solve
from .checker import check_model, first_violated_clause
from .outcome import METRICS, Budget, Cost, PropagationResult, PropagationStatus, SolveOutcome, SolveStatus
from .propagation import propagate_only

__all__ = [
    "CANCEL_CHECK_INTERVAL",
    "DEFAULT_CONFIG",
    "CdclSolver",
    "PreparedFormula",
    "SolverConfig",
    "luby",
    "prepare",
    "solve",
    "check_model",
    "first_violated_clause",
    "METRICS",
    "Budget",
    "Cost",
    "PropagationResult",
    "PropagationStatus",
    "SolveOutcome",
    "SolveStatus",
    "propagate_only",
]

"""
Minimisation of the predictive function over decomposition sets.
"""

from .annealing import COOLING_MODES, AnnealingSchedule, sa_accept, simulated_annealing
from .evaluators import Evaluation, EstimationEvaluator, Evaluator, FunctionEvaluator, SearchBudget, planted_cost
from .search_space import (
    NeighborhoodSpec,
    SearchPoint,
    TabuLists,
    center_activity,
    get_new_center,
    neighborhood_size,
    neighbors,
    ordered_neighbors,
)
from .tabu import tabu_search
from .trace import SearchResult, SearchTrace, TraceRecord, load_best_dset

__all__ = [
    "COOLING_MODES",
    "AnnealingSchedule",
    "sa_accept",
    "simulated_annealing",
    "Evaluation",
    "EstimationEvaluator",
    "Evaluator",
    "FunctionEvaluator",
    "SearchBudget",
    "planted_cost",
    "NeighborhoodSpec",
    "SearchPoint",
    "TabuLists",
    "center_activity",
    "get_new_center",
    "neighborhood_size",
    "neighbors",
    "ordered_neighbors",
    "tabu_search",
    "SearchResult",
    "SearchTrace",
    "TraceRecord",
    "load_best_dset",
]

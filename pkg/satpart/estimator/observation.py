"""
Single observations of the subproblem cost random variable.
"""
from dataclasses import dataclass, field
from typing import Any, Collection, Dict, Optional, Sequence, Tuple, Union

from satpart.estimator.decomposition import DecompositionSet
from satpart.formula.cnf import Cnf
from satpart.solver.cdcl import PreparedFormula, solve
from satpart.solver.outcome import METRICS, Budget, Cost, SolveOutcome, SolveStatus
from satpart.utils.bits import bits_to_hex, hex_to_bits
from satpart.utils.exceptions import EstimationError

METRIC_ALIASES = {"wall": "wall_seconds"}


def canonical_metric(metric: str) -> str:
    """Map a metric name or alias to a Cost field name."""
    name = METRIC_ALIASES.get(metric, metric)
    if name not in METRICS:
        raise EstimationError(f"unknown cost metric {metric!r}; expected one of {', '.join(METRICS)}")
    return name


def budget_limit(budget: Optional[Budget], metric: str) -> Optional[float]:
    if budget is None:
        return None
    if metric == "conflicts":
        return None if budget.max_conflicts is None else float(budget.max_conflicts)
    if metric == "wall_seconds":
        return budget.max_wall_seconds
    return None


@dataclass
class Observation:
    """One solved family member: zeta is the cost in the chosen metric."""
    assignment: Tuple[int, ...]
    status: SolveStatus
    cost_value: float
    censored: bool
    metric: str = "conflicts"
    cost: Cost = field(default_factory=Cost)
    activity: Dict[int, float] = field(default_factory=dict, repr=False)

    @classmethod
    def from_outcome(
        cls,
        assignment: Sequence[int],
        outcome: SolveOutcome,
        metric: str = "conflicts",
        budget: Optional[Budget] = None,
        activity_vars: Optional[Collection[int]] = None,
    ) -> "Observation":
        metric = canonical_metric(metric)
        activity = outcome.activity
        if activity_vars is not None:
            activity = {var: activity.get(var, 0.0) for var in activity_vars}
        value = outcome.cost.value(metric)
        censored = not outcome.status.decided
        if censored:
            # a censored run is only known to cost at least its budget
            limit = budget_limit(budget, metric)
            if limit is not None:
                value = max(value, limit)
        return cls(tuple(int(b) for b in assignment), outcome.status, value, censored, metric, outcome.cost, activity)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "assignment": bits_to_hex(self.assignment),
            "width": len(self.assignment),
            "status": self.status.value,
            "cost_value": self.cost_value,
            "censored": self.censored,
            "metric": self.metric,
            **self.cost.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Observation":
        cost = Cost(
            int(data.get("conflicts", 0)),
            int(data.get("decisions", 0)),
            int(data.get("propagations", 0)),
            float(data.get("wall_seconds", 0.0)),
        )
        return cls(
            hex_to_bits(data["assignment"], int(data["width"])),
            SolveStatus(data["status"]),
            float(data["cost_value"]),
            bool(data["censored"]),
            data.get("metric", "conflicts"),
            cost,
        )


def observe(
    cnf: Union[Cnf, PreparedFormula],
    dset: DecompositionSet,
    assignment: Sequence[int],
    budget: Optional[Budget] = None,
    metric: str = "conflicts",
    activity_vars: Optional[Collection[int]] = None,
) -> Observation:
    """Solve C[X/alpha] as assumptions and record the chosen cost metric."""
    if len(assignment) != dset.d:
        raise EstimationError(f"assignment of width {len(assignment)} for decomposition set of size {dset.d}")
    outcome = solve(cnf, dset.assignment(assignment), budget)
    return Observation.from_outcome(assignment, outcome, metric, budget, activity_vars)

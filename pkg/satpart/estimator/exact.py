"""
Exact enumeration of a decomposition family, the ground truth the predictive function estimates.
"""
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterator, Optional, Tuple, Union

from monitoring import get_logger
from satpart.estimator.decomposition import DecompositionSet
from satpart.estimator.observation import Observation, canonical_metric, observe
from satpart.formula.cnf import Cnf
from satpart.solver.cdcl import PreparedFormula, prepare
from satpart.solver.outcome import Budget
from satpart.utils.bits import gray_code, lsb_bits
from satpart.utils.exceptions import EnumerationCapExceeded

logger = get_logger(__name__)

DEFAULT_ENUMERATION_CAP = 24


@dataclass(frozen=True)
class ExactDistribution:
    """Distinct cost values and their multiplicities over all 2^d family members."""
    entries: Dict[float, int] = field(default_factory=dict)

    @property
    def total_count(self) -> int:
        return sum(self.entries.values())

    @property
    def total(self) -> float:
        return math.fsum(value * count for value, count in self.entries.items())

    @property
    def mean(self) -> float:
        count = self.total_count
        return self.total / count if count else 0.0

    def probability(self, value: float) -> float:
        count = self.total_count
        return self.entries.get(value, 0) / count if count else 0.0


def check_enumeration_cap(d: int, cap: int) -> None:
    if d > cap:
        raise EnumerationCapExceeded(d, cap)


def enumerate_family(
    cnf: Union[Cnf, PreparedFormula],
    dset: DecompositionSet,
    metric: str = "conflicts",
    budget: Optional[Budget] = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Iterator[Observation]:
    """Solve every member of the decomposition family in Gray-code order.

    Member k binds members[j] to bit j of gray(k), the same order run_solving dispatches in, so
    consecutive members differ in exactly one variable.
    """
    check_enumeration_cap(dset.d, cap)
    formula = prepare(cnf)
    for index in range(1 << dset.d):
        yield observe(formula, dset, lsb_bits(gray_code(index), dset.d), budget, metric)


def exact_total_cost(
    cnf: Union[Cnf, PreparedFormula],
    dset: DecompositionSet,
    metric: str = "conflicts",
    budget: Optional[Budget] = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> Tuple[ExactDistribution, float]:
    """
    Solve all 2^d subproblems and return the cost distribution with its exact total.

    Raises:
        EnumerationCapExceeded: d is larger than cap
    """
    metric = canonical_metric(metric)
    counts: Counter = Counter()
    for observation in enumerate_family(cnf, dset, metric, budget, cap):
        counts[observation.cost_value] += 1
    distribution = ExactDistribution(dict(counts))
    logger.debug("Family enumerated", d=dset.d, distinct_values=len(counts), total=distribution.total)
    return distribution, distribution.total

"""
Predictive function and its Monte Carlo confidence interval.

F = 2^d * mean(zeta). The sample standard deviation uses the N - 1 denominator and the interval is
F +- 2^d * delta * sigma / sqrt(N). All sums go through math.fsum, so the result does not depend
on the order in which observations arrive.
"""
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from scipy.stats import norm

from satpart.estimator.observation import Observation, canonical_metric
from satpart.utils.exceptions import EstimationError

CONVENTIONS = ("one_sided", "two_sided")


def normal_quantile(gamma: float, convention: str = "one_sided") -> float:
    """
    Quantile delta for confidence level gamma.

    ``one_sided`` (default) solves Phi(delta) = gamma, so gamma = 0.95 gives about 90% two-sided
    coverage. ``two_sided`` solves Phi(delta) = (1 + gamma) / 2 and covers the mean with probability gamma.
    """
    if not 0.0 < gamma < 1.0:
        raise EstimationError(f"confidence level must lie strictly between 0 and 1, got {gamma}")
    if convention == "two_sided":
        return float(norm.ppf((1.0 + gamma) / 2.0))
    if convention == "one_sided":
        return float(norm.ppf(gamma))
    raise EstimationError(f"unknown confidence convention {convention!r}")


@dataclass(frozen=True)
class PredictiveEstimate:
    f_value: float
    sample_mean: float
    sample_stddev: float
    n: int
    d: int
    gamma: float
    delta: float
    ci: Tuple[float, float]
    censored_count: int
    metric: str
    valid: bool = True
    lower_bound: bool = False
    low_confidence: bool = False
    convention: str = "one_sided"

    @property
    def half_width(self) -> float:
        return (self.ci[1] - self.ci[0]) / 2.0

    def contains(self, value: float) -> bool:
        return self.ci[0] <= value <= self.ci[1]

    @classmethod
    def exact(cls, value: float, d: int = 0, metric: str = "conflicts") -> "PredictiveEstimate":
        """Degenerate estimate for a value known exactly (synthetic cost spaces)."""
        return cls(
            f_value=float(value),
            sample_mean=math.ldexp(float(value), -d),
            sample_stddev=0.0,
            n=1,
            d=d,
            gamma=0.95,
            delta=0.0,
            ci=(float(value), float(value)),
            censored_count=0,
            metric=metric,
        )

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["ci"] = list(self.ci)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "PredictiveEstimate":
        fields = dict(data)
        fields["ci"] = tuple(fields["ci"])
        return cls(**fields)


class ObservationAccumulator:
    """Single-owner aggregation of observations for one decomposition set."""

    def __init__(self, d: int, metric: str = "conflicts"):
        self.d = d
        self.metric = canonical_metric(metric)
        self._values: List[float] = []
        self._censored = 0
        self._activity: Dict[int, List[float]] = {}

    def __len__(self) -> int:
        return len(self._values)

    @property
    def censored_count(self) -> int:
        return self._censored

    def add(self, observation: Observation) -> None:
        if canonical_metric(observation.metric) != self.metric:
            raise EstimationError(f"observation metric {observation.metric!r} differs from {self.metric!r}")
        if len(observation.assignment) != self.d:
            raise EstimationError(f"observation of width {len(observation.assignment)} for d={self.d}")
        self._values.append(observation.cost_value)
        if observation.censored:
            self._censored += 1
        for var, value in observation.activity.items():
            self._activity.setdefault(var, []).append(value)

    def extend(self, observations: Iterable[Observation]) -> None:
        for observation in observations:
            self.add(observation)

    def mean_activity(self) -> Dict[int, float]:
        """Mean normalised conflict activity per variable over the accumulated runs."""
        count = len(self._values)
        if count == 0:
            return {}
        return {var: math.fsum(values) / count for var, values in self._activity.items()}

    def estimate(self, gamma: float = 0.95, convention: str = "one_sided") -> PredictiveEstimate:
        n = len(self._values)
        if n == 0:
            raise EstimationError("cannot estimate from an empty sample")
        delta = normal_quantile(gamma, convention)
        mean = math.fsum(self._values) / n
        f_value = math.ldexp(mean, self.d)
        if n > 1:
            variance = math.fsum((value - mean) ** 2 for value in self._values) / (n - 1)
            stddev = math.sqrt(variance)
        else:
            stddev = 0.0
        half = math.ldexp(delta * stddev / math.sqrt(n), self.d)
        return PredictiveEstimate(
            f_value=f_value,
            sample_mean=mean,
            sample_stddev=stddev,
            n=n,
            d=self.d,
            gamma=gamma,
            delta=delta,
            ci=(f_value - half, f_value + half),
            censored_count=self._censored,
            metric=self.metric,
            valid=self._censored < n,
            lower_bound=self._censored > 0,
            low_confidence=n < 2,
            convention=convention,
        )


def predictive_function(
    observations: Sequence[Observation],
    d: int,
    gamma: float = 0.95,
    convention: str = "one_sided",
    metric: Optional[str] = None,
) -> PredictiveEstimate:
    """
    Compute the predictive function from a random sample's observations.

    Args:
        observations: observations of one decomposition set, all in one metric
        d: size of the decomposition set
        gamma: confidence level of the interval
        convention: quantile convention, see normal_quantile

    Returns:
        PredictiveEstimate; ``valid`` is False when every observation is censored

    Raises:
        EstimationError: empty sample or mixed metrics
    """
    if not observations:
        raise EstimationError("cannot estimate from an empty sample")
    accumulator = ObservationAccumulator(d, metric or observations[0].metric)
    accumulator.extend(observations)
    return accumulator.estimate(gamma, convention)

"""
Monte Carlo estimation of the one-core cost of a decomposition family, plus the sampled SUPB check.
"""

from .decomposition import DecompositionSet
from .exact import DEFAULT_ENUMERATION_CAP, ExactDistribution, check_enumeration_cap, enumerate_family, exact_total_cost
from .observation import Observation, canonical_metric, observe
from .predictive import CONVENTIONS, ObservationAccumulator, PredictiveEstimate, normal_quantile, predictive_function
from .sampling import RandomSample, draw_sample, point_seed
from .supb import SupbReport, sample_supb, verify_supb_sampled

__all__ = [
    "DecompositionSet",
    "DEFAULT_ENUMERATION_CAP",
    "ExactDistribution",
    "check_enumeration_cap",
    "enumerate_family",
    "exact_total_cost",
    "Observation",
    "canonical_metric",
    "observe",
    "CONVENTIONS",
    "ObservationAccumulator",
    "PredictiveEstimate",
    "normal_quantile",
    "predictive_function",
    "RandomSample",
    "draw_sample",
    "point_seed",
    "SupbReport",
    "sample_supb",
    "verify_supb_sampled",
]

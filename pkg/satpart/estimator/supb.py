"""
Sampled check that a variable set is a strong unit propagation backdoor.
"""
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from monitoring import get_logger
from satpart.estimator.decomposition import DecompositionSet
from satpart.estimator.sampling import draw_sample
from satpart.formula.cnf import Cnf
from satpart.solver.cdcl import PreparedFormula, prepare
from satpart.solver.outcome import PropagationStatus
from satpart.solver.propagation import propagate_only

logger = get_logger(__name__)


@dataclass(frozen=True)
class SupbReport:
    trials: int
    decided_sat: int
    decided_unsat: int
    first_undecided: Optional[Tuple[int, ...]] = None

    @property
    def decided(self) -> int:
        return self.decided_sat + self.decided_unsat

    @property
    def fraction(self) -> float:
        return self.decided / self.trials if self.trials else 0.0

    @property
    def certified(self) -> bool:
        return self.trials > 0 and self.decided == self.trials

    def to_dict(self):
        return {
            "trials": self.trials,
            "decided_sat": self.decided_sat,
            "decided_unsat": self.decided_unsat,
            "fraction": self.fraction,
            "certified": self.certified,
        }


def sample_supb(cnf: Union[Cnf, PreparedFormula], varset: DecompositionSet, trials: int, seed: int) -> SupbReport:
    """Propagate `trials` uniform assignments of varset and count how many propagation decides."""
    formula = prepare(cnf)
    varset.validate(formula.var_count)
    if trials < 1:
        return SupbReport(0, 0, 0)
    sample = draw_sample(varset, trials, seed)
    sat = unsat = 0
    first_undecided = None
    for row in sample.assignments:
        status = propagate_only(formula, varset.assignment(row)).status
        if status is PropagationStatus.DECIDED_SAT:
            sat += 1
        elif status is PropagationStatus.DECIDED_UNSAT:
            unsat += 1
        elif first_undecided is None:
            first_undecided = tuple(int(bit) for bit in np.asarray(row))
    report = SupbReport(trials, sat, unsat, first_undecided)
    logger.info("SUPB sample checked", d=varset.d, trials=trials, fraction=report.fraction)
    return report


def verify_supb_sampled(cnf: Union[Cnf, PreparedFormula], varset: DecompositionSet, trials: int, seed: int) -> float:
    """Fraction of sampled varset assignments on which unit propagation alone decides the formula."""
    return sample_supb(cnf, varset, trials, seed).fraction

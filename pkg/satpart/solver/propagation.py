"""
Unit propagation without decisions.
"""
from typing import Optional, Union

from satpart.formula.cnf import Cnf, PartialAssignment
from satpart.solver.cdcl import CdclSolver, PreparedFormula, prepare
from satpart.solver.outcome import PropagationResult


def propagate_only(cnf: Union[Cnf, PreparedFormula], assumptions: Optional[PartialAssignment] = None) -> PropagationResult:
    """
    Propagate units and assumptions to fixpoint with zero decisions.

    DECIDED_SAT means every clause holds a true literal, DECIDED_UNSAT means a conflict was reached.
    The implied set holds every forced literal except the assumptions themselves.
    """
    return CdclSolver(prepare(cnf)).propagate_assumptions(assumptions or PartialAssignment())

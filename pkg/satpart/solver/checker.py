"""
Independent clause-by-clause model checker.

Shares no code with the search engine.
"""
from typing import Mapping, Optional, Sequence, Union

from satpart.formula.cnf import Cnf

Model = Union[Sequence[bool], Mapping[int, bool]]


def _lookup(model: Model, var: int) -> bool:
    if isinstance(model, Mapping):
        return bool(model[var])
    return bool(model[var - 1])


def first_violated_clause(cnf: Cnf, model: Model) -> Optional[int]:
    """Index of the first clause the model falsifies, or None."""
    for index, clause in enumerate(cnf.clauses):
        if not any(_lookup(model, abs(lit)) == (lit > 0) for lit in clause):
            return index
    return None


def check_model(cnf: Cnf, model: Model) -> bool:
    """True iff the total assignment satisfies every clause."""
    if not isinstance(model, Mapping) and len(model) < cnf.var_count:
        return False
    return first_violated_clause(cnf, model) is None

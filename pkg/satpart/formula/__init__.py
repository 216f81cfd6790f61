"""
CNF formulas, DIMACS I/O and decomposition-family substitution.
"""

from .cnf import Cnf, PartialAssignment, check_clause, substitute
from .dimacs import emit_dimacs, emit_model, fingerprint, parse_dimacs, parse_model, read_dimacs, write_dimacs

__all__ = [
    "Cnf",
    "PartialAssignment",
    "check_clause",
    "substitute",
    "parse_dimacs",
    "emit_dimacs",
    "read_dimacs",
    "write_dimacs",
    "fingerprint",
    "emit_model",
    "parse_model",
]

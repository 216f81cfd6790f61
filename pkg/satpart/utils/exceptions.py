"""
Custom exceptions for satpart.
"""
from typing import Optional


class SatPartError(Exception):
    """Base exception for satpart errors."""
    pass


class DimacsParseError(SatPartError):
    """Exception raised for malformed DIMACS input."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.message = message
        self.line_number = line_number
        where = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{where}{message}")


class MalformedHeaderError(DimacsParseError):
    """Missing, duplicated or unparsable 'p cnf' header."""
    pass


class LiteralOutOfRangeError(DimacsParseError):
    """Literal references a variable beyond the declared count."""
    pass


class ClauseCountMismatchError(DimacsParseError):
    """Declared clause count differs from the parsed one."""
    pass


class TautologyError(DimacsParseError):
    """Clause contains a literal and its negation."""
    pass


class AssignmentError(SatPartError):
    """Exception raised for bindings outside the formula's variable range."""
    pass


class SolverInternalError(SatPartError):
    """A solver result failed independent verification. Always fatal."""
    pass


class EstimationError(SatPartError):
    """Exception raised for inconsistent estimation input."""
    pass


class EnumerationCapExceeded(SatPartError):
    """Exception raised when 2^d exceeds the configured enumeration cap."""

    def __init__(self, d: int, cap: int):
        self.d = d
        self.cap = cap
        super().__init__(f"decomposition set of size {d} exceeds enumeration cap {cap}")


class EncodingError(SatPartError):
    """Exception raised for invalid cipher encoding requests."""
    pass


class WeakeningError(SatPartError):
    """Exception raised for invalid weakening requests."""
    pass


class SearchError(SatPartError):
    """Exception raised for invalid search parameters."""
    pass


class OrchestratorError(SatPartError):
    """Exception raised when the worker pool cannot complete a run."""
    pass


class CheckpointCorruptedError(SatPartError):
    """Exception raised when a journal record fails its checksum."""

    def __init__(self, message: str, line_number: int):
        self.message = message
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class ConfigurationError(SatPartError, ValueError):
    """Exception raised for invalid configuration values."""
    pass


class UsageError(SatPartError):
    """Exception raised for invalid command-line usage."""
    pass


class VerificationFailed(SatPartError):
    """Exception raised when a verification check fails."""
    pass

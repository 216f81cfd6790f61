"""
Utility functions for satpart.
"""

from .bits import bits_to_hex, bits_to_int, gray_code, hex_to_bits, int_to_bits, lsb_bits, popcount, words32
from .exceptions import (
    AssignmentError,
    CheckpointCorruptedError,
    ClauseCountMismatchError,
    ConfigurationError,
    DimacsParseError,
    EncodingError,
    EnumerationCapExceeded,
    EstimationError,
    LiteralOutOfRangeError,
    MalformedHeaderError,
    OrchestratorError,
    SatPartError,
    SearchError,
    SolverInternalError,
    TautologyError,
    UsageError,
    VerificationFailed,
    WeakeningError,
)
from .seeding import derive_seed, make_rng

__all__ = [
    "bits_to_hex",
    "bits_to_int",
    "gray_code",
    "hex_to_bits",
    "int_to_bits",
    "lsb_bits",
    "popcount",
    "words32",
    "derive_seed",
    "make_rng",
    "SatPartError",
    "DimacsParseError",
    "MalformedHeaderError",
    "LiteralOutOfRangeError",
    "ClauseCountMismatchError",
    "TautologyError",
    "AssignmentError",
    "SolverInternalError",
    "EstimationError",
    "EnumerationCapExceeded",
    "EncodingError",
    "WeakeningError",
    "SearchError",
    "OrchestratorError",
    "CheckpointCorruptedError",
    "ConfigurationError",
    "UsageError",
    "VerificationFailed",
]

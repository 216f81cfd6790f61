"""
Command-line surface of satpart.
"""

from .commands import (
    EXIT_OK,
    EXIT_RESOURCE,
    EXIT_USAGE,
    EXIT_VERIFICATION,
    CommandResult,
    VerificationReport,
    cmd_encode,
    cmd_estimate,
    cmd_optimize,
    cmd_solve,
    cmd_verify,
    main,
)
from .parser import build_parser, parse_args

__all__ = [
    "EXIT_OK",
    "EXIT_RESOURCE",
    "EXIT_USAGE",
    "EXIT_VERIFICATION",
    "CommandResult",
    "VerificationReport",
    "cmd_encode",
    "cmd_estimate",
    "cmd_optimize",
    "cmd_solve",
    "cmd_verify",
    "main",
    "build_parser",
    "parse_args",
]

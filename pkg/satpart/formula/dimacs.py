"""
DIMACS CNF reading and writing.
"""
import hashlib
import io
from pathlib import Path
from typing import List, Optional, Sequence, TextIO, Tuple, Union

from monitoring import get_logger
from satpart.formula.cnf import Cnf
from satpart.utils.exceptions import (
    ClauseCountMismatchError,
    DimacsParseError,
    LiteralOutOfRangeError,
    MalformedHeaderError,
    TautologyError,
)

logger = get_logger(__name__)


def parse_dimacs(source: Union[str, TextIO]) -> Cnf:
    """
    Parse DIMACS CNF text.

    Args:
        source: DIMACS text or a readable text stream

    Returns:
        Cnf with comments preserved in order

    Raises:
        MalformedHeaderError, LiteralOutOfRangeError, TautologyError, ClauseCountMismatchError
    """
    stream = io.StringIO(source) if isinstance(source, str) else source

    var_count: Optional[int] = None
    declared_clauses = 0
    comments: List[str] = []
    clauses: List[tuple] = []
    current: List[int] = []
    seen = set()
    line_number = 0

    for line_number, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            text = line[1:]
            comments.append(text[1:] if text.startswith(" ") else text)
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if var_count is not None:
                raise MalformedHeaderError("duplicate problem line", line_number)
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise MalformedHeaderError(f"expected 'p cnf <vars> <clauses>', got {line!r}", line_number)
            try:
                var_count, declared_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise MalformedHeaderError(f"non-integer counts in {line!r}", line_number) from None
            if var_count < 0 or declared_clauses < 0:
                raise MalformedHeaderError("negative counts in problem line", line_number)
            continue
        if var_count is None:
            raise MalformedHeaderError("clause before problem line", line_number)

        for token in line.split():
            try:
                lit = int(token)
            except ValueError:
                raise DimacsParseError(f"invalid literal token {token!r}", line_number) from None
            if lit == 0:
                clauses.append(tuple(current))
                current = []
                seen = set()
                continue
            if abs(lit) > var_count:
                raise LiteralOutOfRangeError(f"literal {lit} outside declared range 1..{var_count}", line_number)
            if -lit in seen:
                raise TautologyError(f"tautological clause containing {abs(lit)} and its negation", line_number)
            seen.add(lit)
            current.append(lit)

    if var_count is None:
        raise MalformedHeaderError("missing problem line", line_number or None)
    if current:
        logger.warning("Unterminated final clause accepted", line=line_number, literals=len(current))
        clauses.append(tuple(current))
    if len(clauses) != declared_clauses:
        raise ClauseCountMismatchError(
            f"header declares {declared_clauses} clauses, found {len(clauses)}", line_number
        )

    return Cnf(var_count, tuple(clauses), tuple(comments))


def emit_dimacs(cnf: Cnf) -> str:
    """Render a Cnf as DIMACS text; parse_dimacs(emit_dimacs(c)) == c."""
    lines = [f"c {comment}" if comment else "c" for comment in cnf.comments]
    lines.append(f"p cnf {cnf.var_count} {cnf.clause_count}")
    lines.extend(" ".join([str(lit) for lit in clause] + ["0"]) for clause in cnf.clauses)
    return "\n".join(lines) + "\n"


def read_dimacs(path: Union[str, Path]) -> Cnf:
    with open(path, "r", encoding="utf-8") as handle:
        cnf = parse_dimacs(handle)
    logger.debug("DIMACS loaded", path=str(path), variables=cnf.var_count, clauses=cnf.clause_count)
    return cnf


def write_dimacs(path: Union[str, Path], cnf: Cnf) -> None:
    Path(path).write_text(emit_dimacs(cnf), encoding="utf-8")


def fingerprint(cnf: Cnf) -> str:
    """Stable identity of (var_count, clauses); comments are ignored."""
    return hashlib.sha256(emit_dimacs(Cnf(cnf.var_count, cnf.clauses)).encode("ascii")).hexdigest()


def emit_model(model: Sequence[bool]) -> str:
    """Render a total model in solver-competition form (``s`` line plus ``v`` lines)."""
    literals = [str(v if bit else -v) for v, bit in enumerate(model, start=1)]
    lines = ["s SATISFIABLE"]
    for start in range(0, len(literals), 20):
        lines.append("v " + " ".join(literals[start:start + 20]))
    lines.append("v 0")
    return "\n".join(lines) + "\n"


def parse_model(text: str, var_count: int) -> Tuple[bool, ...]:
    """
    Parse a model from ``v`` lines or bare literal lists; unmentioned variables are false.

    Raises:
        DimacsParseError: non-integer token or literal beyond var_count
    """
    values = [False] * var_count
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "cs":
            continue
        if line.startswith("v"):
            line = line[1:]
        for token in line.split():
            try:
                lit = int(token)
            except ValueError:
                raise DimacsParseError(f"invalid model token {token!r}", line_number) from None
            if lit == 0:
                continue
            if abs(lit) > var_count:
                raise LiteralOutOfRangeError(f"model literal {lit} beyond {var_count} variables", line_number)
            values[abs(lit) - 1] = lit > 0
    return tuple(values)

"""
CNF data model and assignment substitution.

A ``Cnf`` is immutable after construction and safe to share between worker threads. Literals
follow DIMACS conventions: variable ``v`` is the literal ``v``, its negation ``-v``.
"""
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from satpart.utils.exceptions import AssignmentError, LiteralOutOfRangeError, TautologyError

Clause = Tuple[int, ...]


@dataclass(frozen=True)
class Cnf:
    """Formula under study: variable count, clause list and preserved comment lines."""
    var_count: int
    clauses: Tuple[Clause, ...]
    comments: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.var_count < 0:
            raise ValueError(f"var_count must be non-negative, got {self.var_count}")
        clauses = tuple(tuple(int(lit) for lit in clause) for clause in self.clauses)
        for index, clause in enumerate(clauses):
            check_clause(clause, self.var_count, index)
        object.__setattr__(self, "clauses", clauses)
        object.__setattr__(self, "comments", tuple(self.comments))

    @property
    def clause_count(self) -> int:
        return len(self.clauses)

    @property
    def has_empty_clause(self) -> bool:
        """True when the formula is trivially unsatisfiable."""
        return any(len(clause) == 0 for clause in self.clauses)

    def with_comments(self, comments: Iterable[str]) -> "Cnf":
        return Cnf(self.var_count, self.clauses, tuple(comments))

    def add_clauses(self, clauses: Iterable[Sequence[int]]) -> "Cnf":
        return Cnf(self.var_count, self.clauses + tuple(tuple(c) for c in clauses), self.comments)

    def variables(self) -> range:
        return range(1, self.var_count + 1)


def check_clause(clause: Sequence[int], var_count: int, index: Optional[int] = None) -> None:
    """Validate literal range and reject tautologies."""
    seen = set()
    for lit in clause:
        if lit == 0 or abs(lit) > var_count:
            raise LiteralOutOfRangeError(
                f"literal {lit} outside variable range 1..{var_count}"
                + (f" in clause {index}" if index is not None else "")
            )
        if -lit in seen:
            raise TautologyError(f"clause {list(clause)} contains {abs(lit)} and its negation")
        seen.add(lit)


@dataclass(frozen=True, eq=True)
class PartialAssignment:
    """Bindings variable -> value; identifies the minterm over its variables it is true on."""
    bindings: Mapping[int, bool] = field(default_factory=dict)

    def __post_init__(self):
        normalized: Dict[int, bool] = {}
        for var, value in self.bindings.items():
            if int(var) <= 0:
                raise AssignmentError(f"invalid variable index {var}")
            normalized[int(var)] = bool(value)
        object.__setattr__(self, "bindings", normalized)

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def from_literals(cls, literals: Iterable[int]) -> "PartialAssignment":
        bindings: Dict[int, bool] = {}
        for lit in literals:
            var, value = abs(lit), lit > 0
            if lit == 0:
                raise AssignmentError("literal 0 is not a binding")
            if bindings.get(var, value) != value:
                raise AssignmentError(f"variable {var} bound to both values")
            bindings[var] = value
        return cls(bindings)

    @classmethod
    def from_bits(cls, variables: Sequence[int], bits: Sequence[int]) -> "PartialAssignment":
        if len(variables) != len(bits):
            raise AssignmentError(f"{len(bits)} values for {len(variables)} variables")
        return cls({var: bool(bit) for var, bit in zip(variables, bits)})

    def __len__(self) -> int:
        return len(self.bindings)

    def __contains__(self, var: int) -> bool:
        return var in self.bindings

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.bindings))

    def get(self, var: int) -> Optional[bool]:
        return self.bindings.get(var)

    def to_literals(self) -> List[int]:
        """Literals sorted by variable index."""
        return [var if self.bindings[var] else -var for var in sorted(self.bindings)]

    def max_var(self) -> int:
        return max(self.bindings, default=0)

    def validate(self, var_count: int) -> None:
        if self.max_var() > var_count:
            raise AssignmentError(f"binding for variable {self.max_var()} beyond var_count {var_count}")

    def merge(self, other: "PartialAssignment") -> "PartialAssignment":
        """Union of two assignments; overlapping variables must agree."""
        merged = dict(self.bindings)
        for var, value in other.bindings.items():
            if merged.get(var, value) != value:
                raise AssignmentError(f"variable {var} bound to both values")
            merged[var] = value
        return PartialAssignment(merged)

    def satisfies(self, clause: Sequence[int]) -> bool:
        return any(self.bindings.get(abs(lit)) == (lit > 0) for lit in clause)


def substitute(cnf: Cnf, alpha: PartialAssignment) -> Cnf:
    """Return C[X/alpha].

    Satisfied clauses are removed, falsified literals deleted, numbering kept. A clause that
    loses all its literals stays in the list as an empty clause.
    """
    alpha.validate(cnf.var_count)
    bindings = alpha.bindings
    reduced: List[Clause] = []
    for clause in cnf.clauses:
        kept = []
        satisfied = False
        for lit in clause:
            value = bindings.get(abs(lit))
            if value is None:
                kept.append(lit)
            elif value == (lit > 0):
                satisfied = True
                break
        if not satisfied:
            reduced.append(tuple(kept))
    return Cnf(cnf.var_count, tuple(reduced), cnf.comments)

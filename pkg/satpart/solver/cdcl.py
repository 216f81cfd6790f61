"""
Deterministic CDCL solver.

Structure follows MiniSat 2.2: two watched literals, first-UIP learning with basic clause
minimisation, VSIDS branching, phase saving, Luby restarts and activity-based learnt-clause
reduction. Nothing depends on randomness or wall time: restarts and reductions are keyed to the
conflict count and the branching heap breaks activity ties by smallest variable index, so
conflicts/decisions/propagations are identical across runs on identical input.

Internal literals: variable v is 2*v, its negation 2*v + 1.
"""
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, TextIO, Tuple, Union

from monitoring import alert_critical_error, get_logger
from satpart.formula.cnf import Cnf, PartialAssignment
from satpart.solver.checker import check_model
from satpart.solver.outcome import Budget, Cost, PropagationResult, PropagationStatus, SolveOutcome, SolveStatus
from satpart.utils.exceptions import SolverInternalError

logger = get_logger(__name__)

# Cancellation and wall-time limits are polled at least once per this many propagations.
CANCEL_CHECK_INTERVAL = 1024

_UNDEF = 0
_TRUE = 1
_FALSE = -1
_NO_REASON = -1


@dataclass(frozen=True)
class SolverConfig:
    """Fixed deterministic solver settings."""
    var_decay: float = 0.95
    clause_decay: float = 0.999
    restart_first: int = 100
    restart_inc: float = 2.0
    reduce_first: int = 2000
    reduce_inc: int = 300
    proof_path: Optional[str] = None


DEFAULT_CONFIG = SolverConfig()


def to_internal(lit: int) -> int:
    return 2 * lit if lit > 0 else -2 * lit + 1


def to_external(lit: int) -> int:
    return -(lit >> 1) if lit & 1 else lit >> 1


def luby(y: float, x: int) -> float:
    """x-th element of the Luby sequence scaled by y (MiniSat formulation)."""
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x = x % size
    return y ** seq


class PreparedFormula:
    """Immutable internal-literal form of a Cnf, shared read-only between solver instances."""

    def __init__(self, cnf: Cnf):
        self.cnf = cnf
        self.var_count = cnf.var_count
        self.has_empty_clause = False
        units: List[int] = []
        clauses: List[Tuple[int, ...]] = []
        occurs = [False] * (cnf.var_count + 1)
        for clause in cnf.clauses:
            lits = tuple(dict.fromkeys(to_internal(lit) for lit in clause))
            for lit in lits:
                occurs[lit >> 1] = True
            if not lits:
                self.has_empty_clause = True
            elif len(lits) == 1:
                units.append(lits[0])
            else:
                clauses.append(lits)
        self.units = tuple(units)
        self.clauses = tuple(clauses)
        self.occurring = tuple(v for v in range(1, cnf.var_count + 1) if occurs[v])


def prepare(cnf: Union[Cnf, PreparedFormula]) -> PreparedFormula:
    return cnf if isinstance(cnf, PreparedFormula) else PreparedFormula(cnf)


class _VarHeap:
    """Binary max-heap on activity; ties broken by smallest variable index."""

    def __init__(self, activity: List[float]):
        self.activity = activity
        self.heap: List[int] = []
        self.position: Dict[int, int] = {}

    def _before(self, a: int, b: int) -> bool:
        act = self.activity
        return act[a] > act[b] or (act[a] == act[b] and a < b)

    def __contains__(self, var: int) -> bool:
        return var in self.position

    def __len__(self) -> int:
        return len(self.heap)

    def _sift_up(self, i: int) -> None:
        heap, pos = self.heap, self.position
        var = heap[i]
        while i > 0:
            parent = (i - 1) >> 1
            if not self._before(var, heap[parent]):
                break
            heap[i] = heap[parent]
            pos[heap[i]] = i
            i = parent
        heap[i] = var
        pos[var] = i

    def _sift_down(self, i: int) -> None:
        heap, pos = self.heap, self.position
        var = heap[i]
        size = len(heap)
        while True:
            child = 2 * i + 1
            if child >= size:
                break
            right = child + 1
            if right < size and self._before(heap[right], heap[child]):
                child = right
            if not self._before(heap[child], var):
                break
            heap[i] = heap[child]
            pos[heap[i]] = i
            i = child
        heap[i] = var
        pos[var] = i

    def insert(self, var: int) -> None:
        if var in self.position:
            return
        self.heap.append(var)
        self.position[var] = len(self.heap) - 1
        self._sift_up(len(self.heap) - 1)

    def increased(self, var: int) -> None:
        i = self.position.get(var)
        if i is not None:
            self._sift_up(i)

    def pop(self) -> int:
        heap, pos = self.heap, self.position
        top = heap[0]
        last = heap.pop()
        del pos[top]
        if heap:
            heap[0] = last
            pos[last] = 0
            self._sift_down(0)
        return top

    def rebuild(self, variables: Sequence[int]) -> None:
        self.heap = []
        self.position = {}
        for var in variables:
            self.insert(var)


class CdclSolver:
    """One single-threaded solve over a prepared formula. Create a new instance per call."""

    def __init__(self, formula: Union[Cnf, PreparedFormula], config: SolverConfig = DEFAULT_CONFIG):
        self.formula = prepare(formula)
        self.config = config
        n = self.formula.var_count
        self.n = n
        self.val = [_UNDEF] * (2 * n + 2)
        self.level = [0] * (n + 1)
        self.reason = [_NO_REASON] * (n + 1)
        self.phase = [False] * (n + 1)
        self.seen = [False] * (n + 1)
        self.activity = [0.0] * (n + 1)
        self.var_inc = 1.0
        self.cla_inc = 1.0
        self.trail: List[int] = []
        self.trail_lim: List[int] = []
        self.qhead = 0

        self.clauses: List[Optional[List[int]]] = [list(c) for c in self.formula.clauses]
        self.learnt: List[bool] = [False] * len(self.clauses)
        self.cla_act: List[float] = [0.0] * len(self.clauses)
        self.learnt_count = 0
        self.watches: List[List[int]] = [[] for _ in range(2 * n + 2)]
        for index, clause in enumerate(self.clauses):
            self.watches[clause[0]].append(index)
            self.watches[clause[1]].append(index)

        self.heap = _VarHeap(self.activity)
        self.heap.rebuild(self.formula.occurring)

        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self._next_check = CANCEL_CHECK_INTERVAL
        self._budget: Budget = Budget()
        self._deadline: Optional[float] = None
        self._stop: Optional[SolveStatus] = None
        self._proof: Optional[TextIO] = None

    # -- assignment primitives -------------------------------------------------------------

    def _decision_level(self) -> int:
        return len(self.trail_lim)

    def _enqueue(self, lit: int, reason: int) -> None:
        var = lit >> 1
        self.val[lit] = _TRUE
        self.val[lit ^ 1] = _FALSE
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.trail.append(lit)

    def _backtrack(self, target_level: int) -> None:
        if len(self.trail_lim) <= target_level:
            return
        start = self.trail_lim[target_level]
        val, reason, phase, heap = self.val, self.reason, self.phase, self.heap
        for lit in self.trail[start:]:
            var = lit >> 1
            val[lit] = _UNDEF
            val[lit ^ 1] = _UNDEF
            reason[var] = _NO_REASON
            phase[var] = not (lit & 1)
            heap.insert(var)
        del self.trail[start:]
        del self.trail_lim[target_level:]
        self.qhead = len(self.trail)

    # -- limits ----------------------------------------------------------------------------

    def _poll_limits(self) -> bool:
        if self._budget.cancel_signal.is_set():
            self._stop = SolveStatus.CANCELLED
        elif self._deadline is not None and time.perf_counter() >= self._deadline:
            self._stop = SolveStatus.BUDGET_EXCEEDED
        return self._stop is not None

    # -- propagation -----------------------------------------------------------------------

    def _propagate(self) -> int:
        """Propagate the trail to fixpoint. Returns a conflicting clause index or -1."""
        val, clauses, watches, trail = self.val, self.clauses, self.watches, self.trail
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            if self.propagations >= self._next_check:
                self._next_check = self.propagations + CANCEL_CHECK_INTERVAL
                if self._poll_limits():
                    return -1
            false_lit = p ^ 1
            watching = watches[false_lit]
            kept: List[int] = []
            watches[false_lit] = kept
            for position, ci in enumerate(watching):
                clause = clauses[ci]
                if clause is None:
                    continue
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], false_lit
                first = clause[0]
                if val[first] == _TRUE:
                    kept.append(ci)
                    continue
                for k in range(2, len(clause)):
                    candidate = clause[k]
                    if val[candidate] != _FALSE:
                        clause[1], clause[k] = candidate, false_lit
                        watches[candidate].append(ci)
                        break
                else:
                    kept.append(ci)
                    if val[first] == _FALSE:
                        kept.extend(watching[position + 1:])
                        self.qhead = len(trail)
                        return ci
                    self._enqueue(first, ci)
        return -1

    # -- conflict analysis -----------------------------------------------------------------

    def _bump_var(self, var: int) -> None:
        self.activity[var] += self.var_inc
        if self.activity[var] > 1e100:
            for v in range(1, self.n + 1):
                self.activity[v] *= 1e-100
            self.var_inc *= 1e-100
        self.heap.increased(var)

    def _bump_clause(self, ci: int) -> None:
        self.cla_act[ci] += self.cla_inc
        if self.cla_act[ci] > 1e20:
            for i, learnt in enumerate(self.learnt):
                if learnt:
                    self.cla_act[i] *= 1e-20
            self.cla_inc *= 1e-20

    def _analyze(self, confl: int) -> Tuple[List[int], int]:
        seen, level, reason, trail = self.seen, self.level, self.reason, self.trail
        current = self._decision_level()
        learnt: List[int] = [0]
        path = 0
        p = -1
        index = len(trail) - 1

        while True:
            clause = self.clauses[confl]
            if self.learnt[confl]:
                self._bump_clause(confl)
            for q in (clause if p == -1 else clause[1:]):
                var = q >> 1
                if not seen[var] and level[var] > 0:
                    self._bump_var(var)
                    seen[var] = True
                    if level[var] >= current:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[index] >> 1]:
                index -= 1
            p = trail[index]
            index -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1

        minimized = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q >> 1]
            if r == _NO_REASON:
                minimized.append(q)
                continue
            for other in self.clauses[r][1:]:
                var = other >> 1
                if not seen[var] and level[var] > 0:
                    minimized.append(q)
                    break
        for q in learnt[1:]:
            seen[q >> 1] = False

        if len(minimized) == 1:
            return minimized, 0
        best = 1
        for i in range(2, len(minimized)):
            if level[minimized[i] >> 1] > level[minimized[best] >> 1]:
                best = i
        minimized[1], minimized[best] = minimized[best], minimized[1]
        return minimized, level[minimized[1] >> 1]

    def _add_learnt(self, lits: List[int]) -> int:
        index = len(self.clauses)
        self.clauses.append(lits)
        self.learnt.append(True)
        self.cla_act.append(0.0)
        self.learnt_count += 1
        self.watches[lits[0]].append(index)
        self.watches[lits[1]].append(index)
        self._bump_clause(index)
        return index

    def _locked(self, ci: int) -> bool:
        clause = self.clauses[ci]
        first = clause[0]
        return self.val[first] == _TRUE and self.reason[first >> 1] == ci

    def _reduce_learnts(self) -> None:
        candidates = [
            ci for ci, clause in enumerate(self.clauses)
            if self.learnt[ci] and clause is not None and len(clause) > 2 and not self._locked(ci)
        ]
        candidates.sort(key=lambda ci: (self.cla_act[ci], ci))
        for ci in candidates[: len(candidates) // 2]:
            self._log_proof(self.clauses[ci], deleted=True)
            self.clauses[ci] = None
            self.learnt_count -= 1

    # -- proof logging ---------------------------------------------------------------------

    def _log_proof(self, lits: Sequence[int], deleted: bool = False) -> None:
        if self._proof is None:
            return
        prefix = "d " if deleted else ""
        self._proof.write(prefix + " ".join(str(to_external(lit)) for lit in lits) + " 0\n")

    # -- branching -------------------------------------------------------------------------

    def _pick_branch(self) -> int:
        heap, val = self.heap, self.val
        while len(heap):
            var = heap.pop()
            if val[2 * var] == _UNDEF:
                return 2 * var if self.phase[var] else 2 * var + 1
        return -1

    # -- public entry points ---------------------------------------------------------------

    def _load_level_zero(self) -> bool:
        """Enqueue unit clauses. False on an immediate contradiction."""
        if self.formula.has_empty_clause:
            return False
        for lit in self.formula.units:
            if self.val[lit] == _FALSE:
                return False
            if self.val[lit] == _UNDEF:
                self._enqueue(lit, _NO_REASON)
        return True

    def _cost(self, started: float) -> Cost:
        return Cost(self.conflicts, self.decisions, self.propagations, time.perf_counter() - started)

    def _activity_snapshot(self) -> Dict[int, float]:
        total = sum(self.activity)
        if total <= 0.0:
            return {v: 0.0 for v in range(1, self.n + 1)}
        return {v: self.activity[v] / total for v in range(1, self.n + 1)}

    def _outcome(self, status: SolveStatus, started: float, model=None) -> SolveOutcome:
        return SolveOutcome(status, self._cost(started), model, self._activity_snapshot())

    def solve(self, assumptions: Optional[PartialAssignment] = None, budget: Optional[Budget] = None) -> SolveOutcome:
        """Solve under assumptions; see module docstring for the determinism contract."""
        assumptions = assumptions or PartialAssignment()
        assumptions.validate(self.n)
        self._budget = budget or Budget()
        started = time.perf_counter()
        if self._budget.max_wall_seconds is not None:
            self._deadline = started + self._budget.max_wall_seconds
        if self.config.proof_path:
            self._proof = open(self.config.proof_path, "w", encoding="ascii")
        try:
            return self._search(assumptions, started)
        finally:
            if self._proof is not None:
                self._proof.close()
                self._proof = None

    def _search(self, assumptions: PartialAssignment, started: float) -> SolveOutcome:
        if self._poll_limits():
            return self._outcome(self._stop, started)
        if not self._load_level_zero() or self._propagate() != -1:
            self._log_proof([])
            return self._outcome(SolveStatus.UNSAT, started)
        if self._stop is not None:
            return self._outcome(self._stop, started)

        assumed = [to_internal(lit) for lit in assumptions.to_literals()]
        max_conflicts = self._budget.max_conflicts
        restarts = 0
        restart_limit = luby(self.config.restart_inc, restarts) * self.config.restart_first
        since_restart = 0
        next_reduce = self.config.reduce_first
        reductions = 0

        while True:
            confl = self._propagate()
            if self._stop is not None:
                return self._outcome(self._stop, started)

            if confl != -1:
                self.conflicts += 1
                since_restart += 1
                if self._decision_level() == 0:
                    self._log_proof([])
                    return self._outcome(SolveStatus.UNSAT, started)
                learnt, backtrack_level = self._analyze(confl)
                self._backtrack(backtrack_level)
                self._log_proof(learnt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], _NO_REASON)
                else:
                    self._enqueue(learnt[0], self._add_learnt(learnt))
                self.var_inc /= self.config.var_decay
                self.cla_inc /= self.config.clause_decay
                if max_conflicts is not None and self.conflicts >= max_conflicts:
                    return self._outcome(SolveStatus.BUDGET_EXCEEDED, started)
                if self._poll_limits():
                    return self._outcome(self._stop, started)
                continue

            if since_restart >= restart_limit:
                restarts += 1
                since_restart = 0
                restart_limit = luby(self.config.restart_inc, restarts) * self.config.restart_first
                self._backtrack(0)
                if self._poll_limits():
                    return self._outcome(self._stop, started)
                continue

            if self.conflicts >= next_reduce:
                reductions += 1
                next_reduce = self.conflicts + self.config.reduce_first + self.config.reduce_inc * reductions
                self._reduce_learnts()

            decision = -1
            while self._decision_level() < len(assumed):
                p = assumed[self._decision_level()]
                if self.val[p] == _TRUE:
                    self.trail_lim.append(len(self.trail))
                elif self.val[p] == _FALSE:
                    self._log_proof([lit ^ 1 for lit in assumed])
                    return self._outcome(SolveStatus.UNSAT, started)
                else:
                    decision = p
                    break

            if decision == -1:
                decision = self._pick_branch()
                if decision == -1:
                    return self._outcome(SolveStatus.SAT, started, self._model())
                self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(decision, _NO_REASON)

    def _model(self) -> Tuple[bool, ...]:
        return tuple(self.val[2 * v] == _TRUE for v in range(1, self.n + 1))

    def propagate_assumptions(self, assumptions: PartialAssignment) -> PropagationResult:
        """Unit propagation to fixpoint with zero decisions."""
        assumptions.validate(self.n)
        if not self._load_level_zero():
            return PropagationResult(PropagationStatus.DECIDED_UNSAT, frozenset(), self.propagations)
        assumed = [to_internal(lit) for lit in assumptions.to_literals()]
        for lit in assumed:
            if self.val[lit] == _FALSE:
                return PropagationResult(PropagationStatus.DECIDED_UNSAT, frozenset(), self.propagations)
            if self.val[lit] == _UNDEF:
                self._enqueue(lit, _NO_REASON)
        if self._propagate() != -1:
            return PropagationResult(PropagationStatus.DECIDED_UNSAT, frozenset(), self.propagations)

        assumed_set = set(assumed)
        implied = frozenset(to_external(lit) for lit in self.trail if lit not in assumed_set)
        val = self.val
        all_satisfied = all(any(val[lit] == _TRUE for lit in clause) for clause in self.formula.clauses)
        all_units = all(val[lit] == _TRUE for lit in self.formula.units)
        status = PropagationStatus.DECIDED_SAT if all_satisfied and all_units else PropagationStatus.UNDECIDED
        return PropagationResult(status, implied, self.propagations)


def solve(
    cnf: Union[Cnf, PreparedFormula],
    assumptions: Optional[PartialAssignment] = None,
    budget: Optional[Budget] = None,
    config: SolverConfig = DEFAULT_CONFIG,
) -> SolveOutcome:
    """
    Solve a formula under assumptions with a fresh deterministic solver.

    Args:
        cnf: formula or a PreparedFormula shared between calls
        assumptions: partial assignment treated as assumption decisions
        budget: conflict / wall-time limits and the cancel flag

    Returns:
        SolveOutcome; SAT models are verified against the formula and the assumptions

    Raises:
        SolverInternalError: a SAT model failed independent verification
    """
    formula = prepare(cnf)
    outcome = CdclSolver(formula, config).solve(assumptions, budget)
    if outcome.status is SolveStatus.SAT:
        _verify(formula.cnf, outcome, assumptions)
    return outcome


def _verify(cnf: Cnf, outcome: SolveOutcome, assumptions: Optional[PartialAssignment]) -> None:
    model = outcome.model
    assert model is not None
    consistent = assumptions is None or all(model[var - 1] == value for var, value in assumptions.bindings.items())
    if not consistent or not check_model(cnf, model):
        details = "model violates assumptions" if not consistent else "model falsifies a clause"
        alert_critical_error("Unsound solver model", details)
        raise SolverInternalError(details)

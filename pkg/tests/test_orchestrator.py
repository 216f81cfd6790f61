"""
Tests for the journal, the worker pool and the estimation / solving runs.
"""
import threading
from dataclasses import replace

import pytest

from satpart.encoders.builders import build_circuit
from satpart.encoders.ciphers import Cipher
from satpart.encoders.instances import reproduces_keystream, weaken
from satpart.encoders.tseitin import tseitin_encode
from satpart.estimator.decomposition import DecompositionSet
from satpart.estimator.exact import exact_total_cost
from satpart.orchestrator.journal import Journal, JournalState, read_journal, record_checksum
from satpart.orchestrator.pool import WorkerPool
from satpart.orchestrator.runs import (
    SolveRunReport,
    aggregate_one_core_cost,
    family_items,
    run_estimation,
    run_solving,
)
from satpart.orchestrator.work import SubproblemSolver, WorkItem
from satpart.solver.cdcl import CANCEL_CHECK_INTERVAL, CdclSolver, prepare
from satpart.solver.outcome import Budget, Cost, SolveOutcome, SolveStatus
from satpart.utils.bits import gray_code
from satpart.utils.exceptions import CheckpointCorruptedError, EnumerationCapExceeded, OrchestratorError


def fake_outcome(item, budget):
    """UNSAT with a cost equal to the item id."""
    return SolveOutcome(SolveStatus.UNSAT, Cost(conflicts=item.item_id))


def toy_dset():
    return DecompositionSet.of(range(1, 7))


class TestJournal:
    """Tests for the append-only journal."""

    def test_append_and_read(self, tmp_path):
        """Records come back in order with valid checksums."""
        path = tmp_path / "run.jsonl"
        with Journal(path) as journal:
            journal.append("run", mode="solve")
            journal.append("item", item_id=0, status="UNSAT")
        records = read_journal(path)
        assert [r["kind"] for r in records] == ["run", "item"]
        assert all(record_checksum(r) == r["checksum"] for r in records)

    def test_unknown_kind(self, tmp_path):
        """Only the documented record kinds are accepted."""
        with Journal(tmp_path / "j.jsonl") as journal:
            with pytest.raises(ValueError):
                journal.append("note", text="x")

    def test_flipped_checksum(self, tmp_path):
        """A tampered record is reported with its line number."""
        path = tmp_path / "run.jsonl"
        with Journal(path) as journal:
            journal.append("run", mode="solve")
            journal.append("item", item_id=0, status="UNSAT")
        lines = path.read_text().splitlines()
        lines[1] = lines[1].replace("UNSAT", "SAT")
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(CheckpointCorruptedError) as excinfo:
            read_journal(path)
        assert excinfo.value.line_number == 2

    def test_unparsable_line(self, tmp_path):
        """Garbage in a complete line is corruption."""
        path = tmp_path / "run.jsonl"
        path.write_text("{not json}\n")
        with pytest.raises(CheckpointCorruptedError):
            read_journal(path)

    def test_torn_last_line(self, tmp_path):
        """A partial final line is ignored on read and dropped on open."""
        path = tmp_path / "run.jsonl"
        with Journal(path) as journal:
            journal.append("run", mode="solve")
        with open(path, "a") as handle:
            handle.write('{"kind": "item", "item_')
        assert len(read_journal(path)) == 1
        journal = Journal(path)
        assert len(journal.open()) == 1
        journal.append("item", item_id=3, status="UNSAT")
        journal.close()
        assert [r["kind"] for r in read_journal(path)] == ["run", "item"]

    def test_replay_keeps_first_item(self):
        """Duplicate item records are counted, the first one wins."""
        records = [
            {"kind": "run", "mode": "solve"},
            {"kind": "item", "item_id": 1, "status": "UNSAT"},
            {"kind": "item", "item_id": 1, "status": "SAT"},
            {"kind": "summary", "completed": 1},
        ]
        state = JournalState.replay(records)
        assert state.items[1]["status"] == "UNSAT"
        assert state.duplicates == 1
        assert state.summary["completed"] == 1


class TestWorkerPool:
    """Tests for dispatch, retries and deduplication."""

    def items(self, count):
        return [WorkItem(i, (i & 1,)) for i in range(count)]

    def test_every_item_delivered_once(self):
        """Each item reaches the leader exactly once, whatever the worker count."""
        for workers in (1, 3):
            delivered = []
            stats = WorkerPool(workers, fake_outcome).run(self.items(20), lambda r: delivered.append(r.item_id))
            assert sorted(delivered) == list(range(20))
            assert stats.delivered == 20 and stats.duplicates == 0

    def test_duplicate_ids_skipped(self):
        """A repeated item id is dispatched once."""
        items = self.items(3) + [WorkItem(1, (1,))]
        delivered = []
        stats = WorkerPool(2, fake_outcome).run(items, lambda r: delivered.append(r.item_id))
        assert sorted(delivered) == [0, 1, 2]
        assert stats.duplicates == 1

    def test_failed_item_is_retried(self, mocker):
        """A worker exception re-dispatches the item."""
        solve_fn = mocker.Mock(side_effect=[RuntimeError("worker crashed"), fake_outcome(WorkItem(0, (0,)), None)])
        delivered = []
        stats = WorkerPool(1, solve_fn, max_retries=1).run([WorkItem(0, (0,))], delivered.append)
        assert len(delivered) == 1 and delivered[0].attempt == 1
        assert stats.retried == 1
        assert solve_fn.call_count == 2

    def test_retries_exhausted(self):
        """An item failing more than max_retries times aborts the run."""
        def broken(item, budget):
            raise RuntimeError("always fails")

        with pytest.raises(OrchestratorError):
            WorkerPool(2, broken, max_retries=2).run(self.items(3), lambda r: None)

    def test_stop_request(self):
        """on_result returning True stops dispatching."""
        stats = WorkerPool(1, fake_outcome, window=1).run(self.items(50), lambda r: r.item_id == 4)
        assert stats.stopped_early
        assert stats.delivered == 5

    def test_cancel_flag_reaches_solver(self):
        """In-flight items see their cancel flag once the leader stops."""
        seen = []

        def slow(item, budget):
            if item.item_id == 0:
                return SolveOutcome(SolveStatus.SAT, Cost(), (True,))
            budget.cancel_signal.wait(5)
            seen.append(budget.cancelled)
            return SolveOutcome(SolveStatus.CANCELLED, Cost())

        def on_result(result):
            return result.observation.status is SolveStatus.SAT

        stats = WorkerPool(2, slow, window=2).run(self.items(2), on_result)
        assert stats.stopped_early
        assert seen == [True]

    def test_invalid_worker_count(self):
        """At least one worker is required."""
        with pytest.raises(OrchestratorError):
            WorkerPool(0, fake_outcome)

    def test_progress_callback(self):
        """Progress snapshots count completed items."""
        snapshots = []
        WorkerPool(2, fake_outcome).run(self.items(6), lambda r: None, total=6, progress_callback=snapshots.append)
        assert snapshots[-1].completed == 6
        assert snapshots[-1].completion_percentage == 100.0


class TestFamilyItems:
    """Tests for Gray-code enumeration."""

    def test_gray_order(self):
        """Item k binds member j to bit j of gray(k); consecutive items differ in one bit."""
        items = list(family_items(DecompositionSet.of([2, 5, 9]), Budget(), "conflicts"))
        assert [item.item_id for item in items] == list(range(8))
        assert items[3].assignment == (0, 1, 0)
        for a, b in zip(items, items[1:]):
            assert sum(x != y for x, y in zip(a.assignment, b.assignment)) == 1
        assert len({item.assignment for item in items}) == 8
        assert gray_code(3) == 2

    def test_skip(self):
        """Completed items are not generated again."""
        items = list(family_items(DecompositionSet.of([1, 2]), Budget(), "conflicts", skip={0, 2}))
        assert [item.item_id for item in items] == [1, 3]


class TestRunEstimation:
    """Tests for Monte Carlo estimation on the pool."""

    def test_worker_count_invariance(self, cnf_factory):
        """The estimate is identical for 1 and 4 workers."""
        cnf = cnf_factory(20, 85, 21)
        dset = DecompositionSet.from_members(range(1, 21), (1, 2, 3, 4, 5, 6))
        serial = run_estimation(cnf, dset, 40, seed=3, workers=1)
        parallel = run_estimation(cnf, dset, 40, seed=3, workers=4)
        assert serial == parallel
        assert serial.n == 40 and serial.d == 6

    def test_journal_records(self, cnf_factory, tmp_path):
        """One run header, one record per observation and one estimate."""
        cnf = cnf_factory(16, 64, 22)
        path = tmp_path / "estimate.jsonl"
        with Journal(path) as journal:
            estimate = run_estimation(cnf, DecompositionSet.of([1, 2, 3]), 12, seed=1, journal=journal)
        state = JournalState.load(path)
        assert state.header["mode"] == "estimate"
        assert len(state.items) == 12
        assert state.estimates[0]["f_value"] == estimate.f_value

    def test_censored_with_budget(self, cnf_factory):
        """A tiny conflict budget censors hard members."""
        cnf = cnf_factory(40, 170, 23)
        estimate = run_estimation(cnf, DecompositionSet.of([1]), 8, seed=2, budget=Budget(max_conflicts=1))
        assert estimate.censored_count <= 8
        assert estimate.valid == (estimate.censored_count < 8)

    def test_fake_solver(self):
        """An injected solve function drives the estimate."""
        from satpart.formula.cnf import Cnf
        cnf = Cnf(4, ((1, 2), (3, 4)))
        estimate = run_estimation(
            cnf, DecompositionSet.of([1, 2]), 10, seed=0,
            solve_fn=lambda item, budget: SolveOutcome(SolveStatus.UNSAT, Cost(conflicts=5)),
        )
        assert estimate.f_value == 20.0
        assert estimate.sample_stddev == 0.0


class TestAggregateOneCoreCost:
    """Tests for the one-core cost aggregate."""

    def test_unit_costs(self):
        """Sixteen items of one conflict cost 16."""
        report = SolveRunReport(
            dset=DecompositionSet.of([1, 2, 3, 4]),
            total=16,
            completed_ids=tuple(range(16)),
            item_costs={i: Cost(conflicts=1) for i in range(16)},
        )
        assert aggregate_one_core_cost(report) == 16.0

    def test_empty_report(self):
        """No items, no cost."""
        assert aggregate_one_core_cost(SolveRunReport(DecompositionSet.of([1]), 2)) == 0.0

    def test_matches_exact_total(self, cnf_factory):
        """Exhaustive solving costs exactly what enumeration measures."""
        cnf = cnf_factory(16, 68, 24)
        dset = DecompositionSet.of([2, 4, 6, 8])
        report = run_solving(cnf, dset, workers=2, stop_on_sat=False)
        _, total = exact_total_cost(cnf, dset)
        assert report.completed == 16
        assert aggregate_one_core_cost(report) == total

    def test_report_round_trip(self, cnf_factory):
        """Reports survive their JSON form."""
        cnf = cnf_factory(12, 40, 25)
        report = run_solving(cnf, DecompositionSet.of([1, 2]), stop_on_sat=False)
        restored = SolveRunReport.from_dict(report.to_dict())
        assert restored.completed_ids == report.completed_ids
        assert restored.sat_models == report.sat_models
        assert aggregate_one_core_cost(restored) == aggregate_one_core_cost(report)


class TestRunSolving:
    """Tests for solving a whole decomposition family."""

    def test_finds_keystream_state(self, bivium_toy):
        """The toy Bivium family yields a model reproducing the keystream."""
        cnf, meta = bivium_toy
        report = run_solving(cnf, toy_dset(), workers=2)
        assert report.satisfiable
        assert all(reproduces_keystream(model, meta) for model in report.sat_models)

    def test_exhaustive(self, bivium_toy):
        """Without stop_on_sat every family member is completed."""
        cnf, _ = bivium_toy
        report = run_solving(cnf, toy_dset(), workers=3, stop_on_sat=False)
        assert report.completed == 64
        assert report.exhausted and report.satisfiable
        assert not report.stopped_early

    def test_unsatisfiable_family(self, bivium_instance):
        """A corrupted keystream bit makes every member UNSAT."""
        _, meta = bivium_instance
        keystream = list(meta.keystream_bits)
        keystream[0] ^= 1
        cnf, bad_meta = tseitin_encode(build_circuit(Cipher.BIVIUM, 40), keystream, Cipher.BIVIUM)
        bad_meta = replace(bad_meta, secret_witness=meta.secret_witness)
        weakened, _ = weaken(cnf, bad_meta, 171, extend=True)
        report = run_solving(weakened, toy_dset(), workers=2)
        assert report.completed == 64
        assert report.exhausted and not report.satisfiable

    def test_cap(self, small_sat_cnf):
        """Families beyond the enumeration cap are refused."""
        with pytest.raises(EnumerationCapExceeded):
            run_solving(small_sat_cnf, DecompositionSet.of([1, 2, 3]), cap=2)

    def test_resume_after_interruption(self, bivium_toy, tmp_path):
        """An interrupted exhaustive run resumes to the same completed set."""
        cnf, _ = bivium_toy
        dset = toy_dset()
        path = tmp_path / "solve.jsonl"
        real = SubproblemSolver(cnf, [dset])

        def flaky(item, budget):
            if item.item_id >= 20:
                raise RuntimeError("node lost")
            return real(item, budget)

        with pytest.raises(OrchestratorError):
            run_solving(cnf, dset, stop_on_sat=False, checkpoint_path=path, solve_fn=flaky, max_retries=0)
        partial = JournalState.load(path)
        assert 20 <= len(partial.items) < 64

        calls = []

        def counting(item, budget):
            calls.append(item.item_id)
            return real(item, budget)

        resumed = run_solving(cnf, dset, stop_on_sat=False, checkpoint_path=path, solve_fn=counting)
        uninterrupted = run_solving(cnf, dset, stop_on_sat=False)
        assert resumed.completed_ids == uninterrupted.completed_ids == tuple(range(64))
        assert resumed.sat_items == uninterrupted.sat_items
        assert not set(calls) & set(partial.items)

    def test_resume_after_sat_dispatches_nothing(self, bivium_toy, tmp_path, mocker):
        """A journal already holding a model ends a stop-on-SAT run immediately."""
        cnf, _ = bivium_toy
        path = tmp_path / "solve.jsonl"
        first = run_solving(cnf, toy_dset(), checkpoint_path=path)
        solve_fn = mocker.Mock(side_effect=AssertionError("nothing should be solved"))
        second = run_solving(cnf, toy_dset(), checkpoint_path=path, solve_fn=solve_fn)
        assert second.sat_models == first.sat_models
        solve_fn.assert_not_called()

    def test_foreign_journal_rejected(self, bivium_toy, cnf_factory, tmp_path):
        """A journal of another formula cannot be resumed."""
        cnf, _ = bivium_toy
        path = tmp_path / "solve.jsonl"
        run_solving(cnf, toy_dset(), checkpoint_path=path)
        other = cnf_factory(10, 30, 1)
        with pytest.raises(OrchestratorError):
            run_solving(other, DecompositionSet.of([1, 2]), checkpoint_path=path)


class TestWorkerCountInvariance:
    """Tests that exhaustive solving does not depend on the worker count."""

    def summary(self, report):
        costs = {item_id: cost.deterministic() for item_id, cost in report.item_costs.items()}
        return report.completed_ids, report.sat_items, report.sat_models, costs

    @pytest.mark.parametrize("workers", [4, 8])
    def test_bivium_toy(self, bivium_toy, workers):
        """Same completed set, models and one-core cost as a single worker."""
        cnf, _ = bivium_toy
        serial = run_solving(cnf, toy_dset(), workers=1, stop_on_sat=False)
        parallel = run_solving(cnf, toy_dset(), workers=workers, stop_on_sat=False)
        assert self.summary(parallel) == self.summary(serial)
        assert aggregate_one_core_cost(parallel) == aggregate_one_core_cost(serial)
        assert aggregate_one_core_cost(parallel, "propagations") == aggregate_one_core_cost(serial, "propagations")

    @pytest.mark.parametrize("workers", [4, 8])
    def test_random_formula(self, cnf_factory, workers):
        """The same holds on a random formula with a non-trivial cost per member."""
        cnf = cnf_factory(30, 128, 31)
        dset = DecompositionSet.of([3, 7, 11, 19, 23])
        serial = run_solving(cnf, dset, workers=1, stop_on_sat=False)
        parallel = run_solving(cnf, dset, workers=workers, stop_on_sat=False)
        assert parallel.completed == 32
        assert self.summary(parallel) == self.summary(serial)
        assert aggregate_one_core_cost(parallel) == aggregate_one_core_cost(serial)


class TestCancellation:
    """Tests for how quickly in-flight solves stop once the leader has its answer."""

    def test_in_flight_solves_stop_within_one_check_interval(self, cnf_factory):
        """After a SAT result each running solve makes at most CANCEL_CHECK_INTERVAL more propagations."""
        hard = {i: prepare(cnf_factory(100, 426, 60 + i)) for i in range(1, 4)}
        started = threading.Event()
        running = []
        lock = threading.Lock()
        overshoot = []

        class WatchingSolver(CdclSolver):
            seen_at = None

            def _enqueue(self, lit, reason):
                super()._enqueue(lit, reason)
                if self.seen_at is None and self._budget.cancelled:
                    self.seen_at = self.propagations

        def solve_fn(item, budget):
            if item.item_id == 0:
                started.wait(5)
                return SolveOutcome(SolveStatus.SAT, Cost(), (True,))
            solver = WatchingSolver(hard[item.item_id])
            with lock:
                running.append(item.item_id)
                if len(running) == len(hard):
                    started.set()
            outcome = solver.solve(budget=budget)
            if solver.seen_at is not None:
                overshoot.append(outcome.cost.propagations - solver.seen_at)
            return outcome

        stats = WorkerPool(4, solve_fn).run(
            [WorkItem(i, (i & 1,)) for i in range(4)],
            lambda r: r.observation.status is SolveStatus.SAT,
        )
        assert stats.stopped_early
        assert stats.cancelled >= 1
        assert overshoot
        assert all(extra <= CANCEL_CHECK_INTERVAL for extra in overshoot)

    def test_run_solving_leaves_cancelled_items_unrecorded(self, bivium_toy, tmp_path):
        """Cancelled members are neither completed nor journaled."""
        cnf, _ = bivium_toy
        path = tmp_path / "solve.jsonl"
        report = run_solving(cnf, toy_dset(), workers=4, checkpoint_path=path)
        state = JournalState.load(path)
        assert report.satisfiable
        assert set(state.items) == set(report.completed_ids)
        assert all(record["status"] != SolveStatus.CANCELLED.value for record in state.items.values())


@pytest.mark.slow
class TestPredictionAgainstActualCost:
    """Tests comparing F with the measured cost of solving the whole family."""

    def test_weakened_bivium(self, bivium_instance):
        """F from 200 samples brackets the one-core cost of all 64 members in most seeds."""
        cnf, meta = bivium_instance
        weakened, _ = weaken(cnf, meta, 157, extend=True)
        dset = toy_dset()
        report = run_solving(weakened, dset, workers=4, stop_on_sat=False, metric="propagations")
        actual = aggregate_one_core_cost(report)
        assert report.exhausted and actual > 0

        estimates = [
            run_estimation(weakened, dset, 200, seed=seed, workers=4, metric="propagations")
            for seed in range(10)
        ]
        assert sum(estimate.contains(actual) for estimate in estimates) >= 7
        mean_f = sum(estimate.f_value for estimate in estimates) / len(estimates)
        assert mean_f == pytest.approx(actual, rel=0.1)

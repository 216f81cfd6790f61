"""
Tests for the search space, simulated annealing and tabu search.
"""
import math

import numpy as np
import pytest

from satpart.optimizer.annealing import AnnealingSchedule, sa_accept, simulated_annealing
from satpart.optimizer.evaluators import EstimationEvaluator, FunctionEvaluator, SearchBudget, planted_cost
from satpart.optimizer.search_space import (
    NeighborhoodSpec,
    SearchPoint,
    TabuLists,
    get_new_center,
    neighborhood_size,
    neighbors,
    ordered_neighbors,
)
from satpart.optimizer.tabu import tabu_search
from satpart.optimizer.trace import TraceRecord, load_best_dset
from satpart.orchestrator.journal import Journal, JournalState
from satpart.utils.exceptions import SearchError, UsageError


def full_point(width):
    return SearchPoint((1 << width) - 1, width)


class TestSearchPoint:
    """Tests for points of the search space."""

    def test_bits_and_hex_match_decomposition_set(self):
        """A point and its decomposition set render the same hex."""
        universe = (2, 4, 6, 8, 10)
        point = SearchPoint(0b10110, 5)
        dset = point.dset(universe)
        assert dset.members == (4, 6, 10)
        assert point.hex == dset.hex
        assert SearchPoint.from_dset(dset) == point
        assert SearchPoint.from_hex(point.hex, 5) == point

    def test_out_of_range(self):
        """chi must fit the width."""
        with pytest.raises(SearchError):
            SearchPoint(8, 3)

    def test_distance(self):
        """Hamming distance between masks."""
        assert SearchPoint(0b1010, 4).distance(SearchPoint(0b0110, 4)) == 2


class TestNeighbors:
    """Tests for Hamming neighbourhoods."""

    def test_radius_one(self):
        """Width 3, radius 1: the three single flips."""
        result = neighbors(SearchPoint(0b000, 3))
        assert result == [SearchPoint(1, 3), SearchPoint(2, 3), SearchPoint(4, 3)]

    def test_radius_equal_to_width(self):
        """Radius = width reaches every other point."""
        center = SearchPoint(0b101, 3)
        result = neighbors(center, NeighborhoodSpec(3))
        assert len(result) == 7
        assert center not in result
        assert len(set(result)) == 7

    def test_radius_two_of_five(self):
        """Width 5, radius 2: 5 + 10 points."""
        result = neighbors(full_point(5), NeighborhoodSpec(2))
        assert len(result) == 15 == neighborhood_size(5, 2)
        assert all(1 <= p.distance(full_point(5)) <= 2 for p in result)

    def test_seeded_order_is_a_permutation(self):
        """A seed shuffles reproducibly without changing the set."""
        center = SearchPoint(0b0110, 6)
        spec = NeighborhoodSpec(2)
        shuffled = neighbors(center, spec, seed=4)
        assert shuffled == neighbors(center, spec, seed=4)
        assert sorted(shuffled, key=SearchPoint.sort_key) == sorted(ordered_neighbors(center, 2), key=SearchPoint.sort_key)

    def test_invalid_radius(self):
        """Radius 0 is rejected."""
        with pytest.raises(SearchError):
            NeighborhoodSpec(0)


class TestTabuLists:
    """Tests for L1/L2 bookkeeping."""

    def test_first_point(self):
        """The first evaluated point goes to L2."""
        lists = TabuLists(3)
        lists.mark(SearchPoint(0, 3))
        assert set(lists.l2) == {SearchPoint(0, 3)} and not lists.l1

    def test_last_neighbor_moves_point_to_l1(self):
        """Marking the last unchecked neighbour promotes a point."""
        lists = TabuLists(2)
        for chi in (0b00, 0b01):
            lists.mark(SearchPoint(chi, 2))
        assert SearchPoint(0, 2) in lists.l2
        lists.mark(SearchPoint(0b10, 2))
        assert SearchPoint(0, 2) in lists.l1

    def test_random_crawl_keeps_invariants(self):
        """Width-4 crawl: L1 and L2 partition the evaluated points at every step."""
        rng = np.random.default_rng(17)
        lists = TabuLists(4)
        evaluated = set()
        for chi in rng.permutation(16):
            point = SearchPoint(int(chi), 4)
            lists.mark(point)
            evaluated.add(point)
            lists.check_invariants()
            assert set(lists.l1) | set(lists.l2) == evaluated
            assert not set(lists.l1) & set(lists.l2)
        assert len(lists.l1) == 16 and not lists.l2

    def test_radius_two(self):
        """With radius 2 every point needs all ten neighbours checked."""
        lists = TabuLists(4, radius=2)
        for chi in range(16):
            lists.mark(SearchPoint(chi, 4))
            lists.check_invariants()
        assert len(lists.l1) == 16


class TestGetNewCenter:
    """Tests for activity-based recentring."""

    def test_highest_activity_wins(self):
        """The point whose members carry the most activity is chosen."""
        universe = (1, 2, 3)
        l2 = [SearchPoint(0b001, 3), SearchPoint(0b110, 3)]
        assert get_new_center(l2, {1: 0.5, 2: 0.2, 3: 0.2}, universe) == SearchPoint(0b001, 3)
        assert get_new_center(l2, {1: 0.3, 2: 0.2, 3: 0.2}, universe) == SearchPoint(0b110, 3)

    def test_ties_go_to_smallest_bit_vector(self):
        """Equal activity picks the lexicographically smallest bit vector."""
        universe = (1, 2, 3)
        l2 = [SearchPoint(0b001, 3), SearchPoint(0b010, 3)]
        assert get_new_center(l2, {1: 0.5, 2: 0.5}, universe) == SearchPoint(0b010, 3)

    def test_scale_invariant(self):
        """Scaling every activity leaves the choice unchanged."""
        universe = (1, 2, 3, 4)
        l2 = [SearchPoint(chi, 4) for chi in (3, 5, 12)]
        activity = {1: 0.1, 2: 0.4, 3: 0.3, 4: 0.2}
        scaled = {var: value * 1000 for var, value in activity.items()}
        assert get_new_center(l2, activity, universe) == get_new_center(l2, scaled, universe)

    def test_empty(self):
        """Empty L2 has no centre."""
        with pytest.raises(SearchError):
            get_new_center([], {}, (1,))


class TestSaAccept:
    """Tests for the acceptance rule."""

    def test_improvement_always_accepted(self):
        """A better candidate is taken whatever the random draw."""
        assert sa_accept(1.0, 2.0, 0.5, 0.999)

    def test_equal_values_accepted(self):
        """Delta 0 has acceptance probability 1."""
        assert sa_accept(2.0, 2.0, 1e-9, 0.999)

    def test_zero_temperature(self):
        """At T = 0 only non-worsening moves pass."""
        assert not sa_accept(3.0, 2.0, 0.0, 0.0)

    @pytest.mark.parametrize("ratio", [0.5, 1.0, 2.0])
    def test_acceptance_frequency(self, ratio):
        """Uphill acceptance frequency matches exp(-delta/T) within 0.01 over 10^5 draws."""
        rng = np.random.default_rng(int(ratio * 100))
        temperature = 4.0
        draws = rng.random(100_000)
        accepted = sum(sa_accept(10.0 + ratio * temperature, 10.0, temperature, u) for u in draws)
        assert abs(accepted / draws.size - math.exp(-ratio)) < 0.01


class TestAnnealingSchedule:
    """Tests for schedule validation."""

    def test_defaults_resolve_from_start_value(self):
        """t0 = F/10 and t_inf = t0 * 1e-4 when unset."""
        t0, t_inf = AnnealingSchedule().resolve(50.0)
        assert t0 == 5.0 and t_inf == pytest.approx(5e-4)
        assert AnnealingSchedule().resolve(0.0) == (1.0, pytest.approx(1e-4))

    @pytest.mark.parametrize("kwargs", [
        {"q_mult": 1.0},
        {"q_mult": 0.0},
        {"t0": -1.0},
        {"t0": 1.0, "t_inf": 2.0},
        {"cooling": "per_week"},
    ])
    def test_invalid(self, kwargs):
        """Bad schedules are rejected up front."""
        with pytest.raises(SearchError):
            AnnealingSchedule(**kwargs)


class TestSimulatedAnnealing:
    """Tests for simulated annealing on synthetic landscapes."""

    def test_recovers_planted_optimum(self):
        """Width-8 planted landscape: the optimum is found in 100 of 100 seeded runs."""
        universe = tuple(range(1, 9))
        rng = np.random.default_rng(1)
        for run in range(100):
            optimum = SearchPoint(int(rng.integers(0, 256)), 8)
            evaluator = FunctionEvaluator(universe, planted_cost(optimum))
            result = simulated_annealing(evaluator, full_point(8), budget=SearchBudget(max_evaluations=256), seed=run)
            assert result.best.point == optimum

    def test_constant_landscape_stops_by_temperature(self):
        """On a flat landscape the schedule ends the search."""
        evaluator = FunctionEvaluator(tuple(range(1, 7)), lambda point: 10.0)
        result = simulated_annealing(evaluator, full_point(6), seed=3)
        assert result.stop_reason == "temperature"
        assert result.reevaluations == 0

    def test_budget(self):
        """max_evaluations bounds the number of F evaluations."""
        evaluator = FunctionEvaluator(tuple(range(1, 9)), planted_cost(SearchPoint(0, 8)))
        result = simulated_annealing(evaluator, full_point(8), budget=SearchBudget(max_evaluations=5))
        assert result.evaluations == 5
        assert result.stop_reason == "budget" and result.budget_exhausted

    def test_space_exhausted(self):
        """A tiny space runs out of unchecked neighbours before cooling ends."""
        evaluator = FunctionEvaluator((1, 2), planted_cost(SearchPoint(0, 2)))
        schedule = AnnealingSchedule(t0=1e-6, t_inf=1e-300, q_mult=0.999, cooling="per_transition")
        result = simulated_annealing(evaluator, SearchPoint(0, 2), schedule=schedule)
        assert result.stop_reason == "space_exhausted"
        assert result.evaluations == 4

    def test_global_best_versus_last_accepted(self):
        """best is never worse than the last accepted point."""
        evaluator = FunctionEvaluator(tuple(range(1, 7)), planted_cost(SearchPoint(0b101010, 6)))
        result = simulated_annealing(evaluator, full_point(6), seed=8)
        assert result.best.f_value <= result.literal_best.f_value
        assert result.best.f_value == min(record.f_value for record in result.trace)

    def test_reproducible(self):
        """Same seed, same trace."""
        cost = planted_cost(SearchPoint(0b0011, 6))
        first = simulated_annealing(FunctionEvaluator(tuple(range(1, 7)), cost), full_point(6), seed=5)
        second = simulated_annealing(FunctionEvaluator(tuple(range(1, 7)), cost), full_point(6), seed=5)
        assert first.trace == second.trace


class TestTabuSearch:
    """Tests for tabu search."""

    def test_recovers_planted_optimum(self):
        """Width-8 planted landscape: the optimum is found in 100 of 100 seeded runs."""
        universe = tuple(range(1, 9))
        rng = np.random.default_rng(2)
        for run in range(100):
            optimum = SearchPoint(int(rng.integers(0, 256)), 8)
            evaluator = FunctionEvaluator(universe, planted_cost(optimum))
            result = tabu_search(evaluator, full_point(8), budget=SearchBudget(max_evaluations=256), seed=run)
            assert result.best.point == optimum
            assert result.reevaluations == 0

    def test_exhausts_small_space(self):
        """Width 3 without a budget evaluates all 8 points once and empties L2."""
        evaluator = FunctionEvaluator((1, 2, 3), planted_cost(SearchPoint(0b010, 3)))
        result = tabu_search(evaluator, full_point(3))
        assert result.stop_reason == "l2_empty"
        assert result.evaluations == 8
        assert result.reevaluations == 0
        assert len(result.lists.l1) == 8
        result.lists.check_invariants()

    def test_budget_truncates_batches(self):
        """Evaluations never exceed max_evaluations."""
        evaluator = FunctionEvaluator(tuple(range(1, 11)), planted_cost(SearchPoint(0, 10)))
        result = tabu_search(evaluator, full_point(10), budget=SearchBudget(max_evaluations=15))
        assert result.evaluations == 15
        assert result.stop_reason == "budget"

    def test_recentres_by_activity(self):
        """At a local optimum the search moves to the L2 point with the most activity."""
        universe = (1, 2, 3, 4)

        def activity(point):
            return {1: 0.7, 2: 0.1, 3: 0.1, 4: 0.1}

        evaluator = FunctionEvaluator(universe, lambda point: 5.0, activity)
        result = tabu_search(evaluator, SearchPoint(0b0000, 4), budget=SearchBudget(max_evaluations=6))
        centres = [record.center for record in result.trace if record.center is not None]
        assert centres[0] == SearchPoint(0, 4).hex
        assert centres[-1] == SearchPoint(0b0001, 4).hex

    def test_journal_trace_and_best(self, tmp_path):
        """The journal replays to the same trace and best set."""
        path = tmp_path / "search.jsonl"
        evaluator = FunctionEvaluator(tuple(range(1, 6)), planted_cost(SearchPoint(0b00101, 5)))
        with Journal(path) as journal:
            result = tabu_search(evaluator, full_point(5), journal=journal)
        state = JournalState.load(path)
        assert state.header["algorithm"] == "tabu"
        assert [TraceRecord.from_dict(record) for record in state.traces] == result.trace
        assert state.summary["best_chi"] == result.best.point.hex
        assert load_best_dset(path) == result.best_dset

    def test_load_best_dset_requires_optimize_journal(self, tmp_path):
        """Other journals are refused."""
        path = tmp_path / "other.jsonl"
        with Journal(path) as journal:
            journal.append("run", mode="estimate")
        with pytest.raises(UsageError):
            load_best_dset(path)


class TestEstimationSearch:
    """Search driven by Monte Carlo estimates on a real formula."""

    def test_tabu_on_random_formula(self, cnf_factory):
        """Estimates are deterministic and never re-evaluated."""
        cnf = cnf_factory(20, 85, 12)
        universe = tuple(range(1, 9))

        def run(workers):
            evaluator = EstimationEvaluator(cnf, universe, sample_size=8, seed=4, workers=workers)
            return tabu_search(evaluator, full_point(8), budget=SearchBudget(max_evaluations=12), seed=4)

        serial = run(1)
        parallel = run(3)
        assert serial.evaluations == 12 and serial.reevaluations == 0
        assert [r.f_value for r in serial.trace] == [r.f_value for r in parallel.trace]
        assert serial.best.point == parallel.best.point
        assert serial.best.f_value <= serial.trace[0].f_value

    def test_annealing_on_random_formula(self, cnf_factory):
        """Annealing stays within its evaluation budget on real estimates."""
        cnf = cnf_factory(18, 76, 13)
        evaluator = EstimationEvaluator(cnf, tuple(range(1, 7)), sample_size=6, seed=2)
        result = simulated_annealing(evaluator, full_point(6), budget=SearchBudget(max_evaluations=8), seed=2)
        assert result.evaluations <= 8
        assert result.best.estimate.n == 6

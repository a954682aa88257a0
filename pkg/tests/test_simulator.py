import numpy as np
import pytest

from vibropref.acquisition import AcquisitionConfig
from vibropref.prefmodel import fit_posterior, posterior_mean, ComparisonRecord
from vibropref.signal import NormalizedPoint
from vibropref.simulator import (
    GroundTruthUtility,
    SimulationConfig,
    oracle_respond,
    percentile_rank,
    random_gmm,
    run_simulation,
    spearman,
)


def single_bump(center=(0.5, 0.5, 0.5, 0.5), width=0.2):
    return GroundTruthUtility(((NormalizedPoint(center), 1.0, width),))


class TestGroundTruth:
    def test_positive_and_finite_everywhere(self):
        gt = random_gmm(np.random.default_rng(0))
        grid = np.random.default_rng(1).uniform(size=(1000, 4))
        values = gt(grid)
        assert np.all(np.isfinite(values)) and np.all(values >= 0.0)

    def test_peak_at_center(self):
        gt = single_bump()
        assert gt(NormalizedPoint((0.5,) * 4)) == pytest.approx(1.0)
        assert gt(NormalizedPoint((0.9,) * 4)) < 1.0

    def test_random_gmm_centers_interior(self):
        for seed in range(5):
            gt = random_gmm(np.random.default_rng(seed))
            assert len(gt.components) == 2
            for center, weight, width in gt.components:
                assert all(0.2 <= c <= 0.8 for c in center.coords)
                assert weight == 1.0 and width == 0.2

    def test_validation(self):
        with pytest.raises(ValueError):
            GroundTruthUtility(())
        with pytest.raises(ValueError):
            GroundTruthUtility(((NormalizedPoint((0.5,) * 4), -1.0, 0.2),))

    def test_json_round_trip(self):
        gt = random_gmm(np.random.default_rng(2), n_components=3)
        back = GroundTruthUtility.from_json_dict(gt.to_json_dict())
        assert back == gt


class TestOracle:
    def test_tie_is_plus_one_lowest_confidence(self):
        gt = single_bump()
        x = NormalizedPoint((0.3, 0.5, 0.5, 0.5))
        y = NormalizedPoint((0.7, 0.5, 0.5, 0.5))  # symmetric: same utility
        assert oracle_respond(gt, x, y, 1.0) == (+1, 1)

    def test_full_range_gap_maxes_confidence(self):
        gt = single_bump(width=0.1)
        best = NormalizedPoint((0.5,) * 4)
        worst = NormalizedPoint((0.0,) * 4)
        delta = gt(best) - gt(worst)
        y, c = oracle_respond(gt, best, worst, float(delta))
        assert (y, c) == (+1, 5)

    def test_thirty_percent_gap_is_confidence_two(self):
        # 1 + round(4 * 0.3) = 1 + round(1.2) = 2
        gt = single_bump(width=0.25)
        a = NormalizedPoint((0.5,) * 4)
        b = NormalizedPoint((0.1, 0.5, 0.5, 0.5))
        delta = float(gt(a) - gt(b))
        _, c = oracle_respond(gt, a, b, delta / 0.3)
        assert c == 2

    def test_sign_tracks_utility(self):
        gt = random_gmm(np.random.default_rng(3))
        rng = np.random.default_rng(4)
        grid = rng.uniform(size=(256, 4))
        rs = float(gt(grid).max() - gt(grid).min())
        for _ in range(200):
            a = NormalizedPoint(tuple(rng.uniform(size=4)))
            b = NormalizedPoint(tuple(rng.uniform(size=4)))
            y, c = oracle_respond(gt, a, b, rs)
            if abs(gt(a) - gt(b)) > 1e-12:
                assert y == (1 if gt(a) > gt(b) else -1)
            assert 1 <= c <= 5

    def test_rejects_nonpositive_range(self):
        gt = single_bump()
        a = NormalizedPoint((0.5,) * 4)
        with pytest.raises(ValueError):
            oracle_respond(gt, a, a, 0.0)


class TestSpearman:
    def test_identical_lists(self):
        assert spearman([1.0, 2.0, 5.0, 9.0], [1.0, 2.0, 5.0, 9.0]) == pytest.approx(1.0)

    def test_reversed_lists(self):
        assert spearman([1, 2, 3, 4], [4, 3, 2, 1]) == pytest.approx(-1.0)

    def test_hand_computed_swap(self):
        assert spearman([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, rel=1e-12)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(5)
        a = rng.normal(size=50)
        assert spearman(a, np.exp(a)) == pytest.approx(1.0)

    def test_constant_list_rejected(self):
        with pytest.raises(ValueError):
            spearman([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            spearman([1.0, 2.0], [1.0, 2.0, 3.0])


class TestPercentileRank:
    def test_grid_argmax_is_hundred(self):
        gt = single_bump()
        grid = np.random.default_rng(6).uniform(size=(512, 4))
        best = grid[int(np.argmax(gt(grid)))]
        assert percentile_rank(gt, best, grid) == 100.0

    def test_grid_argmin_is_one_over_n(self):
        gt = single_bump()
        grid = np.random.default_rng(7).uniform(size=(512, 4))
        worst = grid[int(np.argmin(gt(grid)))]
        assert percentile_rank(gt, worst, grid) == pytest.approx(100.0 / 512)

    def test_matches_brute_force_count(self):
        gt = random_gmm(np.random.default_rng(8))
        grid = np.random.default_rng(9).uniform(size=(256, 4))
        x = NormalizedPoint((0.4, 0.6, 0.5, 0.5))
        expected = 100.0 * np.sum(gt(grid) <= gt(x)) / 256
        assert percentile_rank(gt, x, grid) == pytest.approx(expected)

    def test_works_against_posterior(self):
        a = NormalizedPoint((0.1,) * 4)
        b = NormalizedPoint((0.9,) * 4)
        post = fit_posterior([ComparisonRecord(a, b, +1, 5)])
        grid = np.random.default_rng(10).uniform(size=(128, 4))
        values = posterior_mean(post, grid)
        best = grid[int(np.argmax(values))]
        assert percentile_rank(post, best, grid) == 100.0

    def test_empty_grid_rejected(self):
        gt = single_bump()
        with pytest.raises(ValueError):
            percentile_rank(gt, NormalizedPoint((0.5,) * 4), np.zeros((0, 4)))


class TestRunSimulation:
    def test_deterministic_traces(self):
        cfg = SimulationConfig(seed=3, rounds=6)
        t1 = run_simulation(cfg)
        t2 = run_simulation(cfg)
        assert t1.to_json() == t2.to_json()

    def test_round_records_complete_and_consistent(self):
        cfg = SimulationConfig(seed=4, rounds=8)
        trace = run_simulation(cfg)
        gt = trace.ground_truth
        assert [r["round"] for r in trace.rounds] == list(range(1, 9))
        for r in trace.rounds:
            a = NormalizedPoint(tuple(r["point_a"]))
            b = NormalizedPoint(tuple(r["point_b"]))
            delta = float(gt(a)) - float(gt(b))
            if abs(delta) > 1e-12:
                assert r["choice"] == (1 if delta > 0 else -1)
            assert 1 <= r["confidence"] <= 5
            assert r["info_gain"] >= 0.0
            assert r["spearman"] is None or -1.0 <= r["spearman"] <= 1.0

    def test_flat_landscape_flagged_degenerate(self):
        gt = single_bump(width=1e6)  # constant to within float dust
        cfg = SimulationConfig(seed=5, rounds=4, ground_truth=gt)
        trace = run_simulation(cfg)
        assert trace.degenerate_ground_truth
        assert all(r["confidence"] == 1 for r in trace.rounds)
        assert all(r["spearman"] is None for r in trace.rounds)

    def test_recommendation_fields(self):
        cfg = SimulationConfig(seed=6, rounds=6)
        trace = run_simulation(cfg)
        rec = trace.recommendation
        assert len(rec["point"]) == 4
        assert 0.0 <= rec["gt_percentile"] <= 100.0
        assert rec["gt_value"] >= 0.0
        assert 0.0 <= trace.holdout_accuracy <= 1.0

    def test_eubo_strategy_runs(self):
        cfg = SimulationConfig(
            seed=7, rounds=5, acquisition=AcquisitionConfig(strategy="eubo")
        )
        trace = run_simulation(cfg)
        assert trace.strategy == "eubo"
        assert len(trace.rounds) == 5

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SimulationConfig(rounds=0)
        with pytest.raises(ValueError):
            SimulationConfig(eval_grid_size=1)

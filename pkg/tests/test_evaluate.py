import numpy as np
import pytest
from scipy.stats import chi2, studentized_range

from balancekit.dataset import SynthSpec, make_imbalanced
from balancekit.evaluate import (
    EVAL_METRICS,
    _Q_TABLE,
    friedman,
    nemenyi_cd,
    rank_blocks,
    run_experiment,
    select_best,
)
from balancekit.forest import ForestConfig
from balancekit.resample import ResampleConfig, StrategyId

import oracles


class TestRankBlocks:
    def test_mid_rank_convention(self):
        ranks = rank_blocks([[0.9, 0.8, 0.8]])
        np.testing.assert_array_equal(ranks, [[1.0, 2.5, 2.5]])

    def test_strictly_decreasing(self):
        ranks = rank_blocks([[0.9, 0.7, 0.5, 0.3]])
        np.testing.assert_array_equal(ranks, [[1, 2, 3, 4]])

    def test_all_equal(self):
        ranks = rank_blocks([[0.5, 0.5, 0.5]])
        np.testing.assert_array_equal(ranks, [[2.0, 2.0, 2.0]])

    def test_rank_sums(self):
        rng = np.random.default_rng(3)
        values = rng.choice([0.1, 0.2, 0.3], size=(20, 6))
        ranks = rank_blocks(values)
        np.testing.assert_allclose(ranks.sum(axis=1), 6 * 7 / 2)

    def test_lower_is_better_mode(self):
        ranks = rank_blocks([[3.0, 1.0, 2.0]], higher_is_better=False)
        np.testing.assert_array_equal(ranks, [[3, 1, 2]])


class TestFriedman:
    def test_perfect_two_way_split(self):
        ranks = np.tile([1.0, 2.0], (10, 1))
        statistic, p = friedman(ranks)
        assert statistic == pytest.approx(10.0)
        assert p == pytest.approx(float(chi2.sf(10.0, 1)))

    def test_all_tied(self):
        ranks = np.full((6, 4), 2.5)
        statistic, p = friedman(ranks)
        assert statistic == pytest.approx(0.0)
        assert p == pytest.approx(1.0)

    def test_matches_rank_sum_form_oracle(self):
        rng = np.random.default_rng(8)
        for _ in range(10):
            n_blocks = int(rng.integers(3, 12))
            k = int(rng.integers(2, 6))
            values = rng.choice([0.2, 0.4, 0.6, 0.8], size=(n_blocks, k))
            statistic, _ = friedman(rank_blocks(values))
            assert statistic == pytest.approx(
                oracles.friedman_rank_sum_form(values), abs=1e-9
            )

    def test_hand_built_3x3(self):
        # blocks rank strategies as (1,2,3), (1,3,2), (1,2,3)
        ranks = np.array([[1, 2, 3], [1, 3, 2], [1, 2, 3]], dtype=float)
        statistic, _ = friedman(ranks)
        # avg ranks: 1, 7/3, 8/3 -> 12*3/12 * (1 + 49/9 + 64/9 - 12) = 3*(122/9 - 12)
        expected = 3.0 * (1 + 49 / 9 + 64 / 9 - 12)
        assert statistic == pytest.approx(expected, abs=1e-12)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(5)
        values = rng.normal(size=(8, 4))
        base, _ = friedman(rank_blocks(values))
        transformed, _ = friedman(rank_blocks(np.exp(values)))
        assert transformed == pytest.approx(base)


class TestNemenyi:
    def test_k2_n10(self):
        assert nemenyi_cd(2, 10) == pytest.approx(1.960 * np.sqrt(6 / 60), abs=1e-4)

    def test_k8_n40(self):
        assert nemenyi_cd(8, 40) == pytest.approx(3.031 * np.sqrt(72 / 240), abs=1e-9)
        assert nemenyi_cd(8, 40) == pytest.approx(1.660, abs=1e-3)

    def test_quadrupling_n_halves_cd(self):
        assert nemenyi_cd(5, 80) == pytest.approx(nemenyi_cd(5, 20) / 2)

    def test_q_table_matches_studentized_range(self):
        for alpha, row in _Q_TABLE.items():
            for k, q in row.items():
                expected = studentized_range.ppf(1 - alpha, k, np.inf) / np.sqrt(2)
                assert q == pytest.approx(expected, abs=5e-3), (alpha, k)

    def test_unknown_k_rejected(self):
        with pytest.raises(ValueError):
            nemenyi_cd(25, 10)


class TestSelectBest:
    def test_dominant_strategy(self):
        strategies = (StrategyId.ORIGINAL, StrategyId.SMOTE)
        avg_ranks = {"original": 2.0, "smote": 1.0}
        means = {t: {"iba": 0.5, "op": 0.5} for t in ("original", "smote")}
        assert select_best(avg_ranks, means, strategies) is StrategyId.SMOTE

    def test_tie_broken_by_iba_then_op(self):
        strategies = (StrategyId.RUS, StrategyId.ROS)
        avg_ranks = {"rus": 1.5, "ros": 1.5}
        means = {"rus": {"iba": 0.79, "op": 0.9}, "ros": {"iba": 0.82, "op": 0.1}}
        assert select_best(avg_ranks, means, strategies) is StrategyId.ROS
        means = {"rus": {"iba": 0.8, "op": 0.3}, "ros": {"iba": 0.8, "op": 0.4}}
        assert select_best(avg_ranks, means, strategies) is StrategyId.ROS

    def test_full_tie_uses_strategy_order(self):
        strategies = (StrategyId.SMOTE, StrategyId.RUS)
        avg_ranks = {"smote": 1.5, "rus": 1.5}
        means = {t: {"iba": 0.5, "op": 0.5} for t in ("smote", "rus")}
        assert select_best(avg_ranks, means, strategies) is StrategyId.RUS


def small_dataset(seed=0):
    return make_imbalanced(
        SynthSpec(n=120, p=3, informative=2, ir_target=4, class_sep=1.5, seed=seed)
    )


class TestRunExperiment:
    def test_bookkeeping_single_strategy(self):
        d = small_dataset()
        report = run_experiment(
            d, (StrategyId.ORIGINAL,), ResampleConfig(), ForestConfig(n_trees=5),
            K=3, R=2, seed=1,
        )
        assert report.strategies == (StrategyId.ORIGINAL,)
        assert report.fold_values["original"]["accuracy"].shape == (2, 3)
        assert report.best_strategy is StrategyId.ORIGINAL
        assert set(report.metrics) == set(EVAL_METRICS)

    def test_test_folds_partition_and_stay_clean(self):
        d = small_dataset(3)
        outcomes = []
        run_experiment(
            d, (StrategyId.ORIGINAL, StrategyId.SMOTE), ResampleConfig(perc_over=200),
            ForestConfig(n_trees=4), K=3, R=2, seed=5, on_fold=outcomes.append,
        )
        by_rep = {}
        for o in outcomes:
            assert len(np.intersect1d(o.train_indices, o.test_indices)) == 0
            assert len(np.unique(o.test_indices)) == len(o.test_indices)
            assert o.test_indices.min() >= 0 and o.test_indices.max() < d.n
            by_rep.setdefault((o.rep, o.strategy), []).append(o.test_indices)
        for (rep, _), folds in by_rep.items():
            combined = np.sort(np.concatenate(folds))
            np.testing.assert_array_equal(combined, np.arange(d.n))

    def test_thread_count_does_not_change_results(self):
        d = small_dataset(7)
        kwargs = dict(
            strategies=(StrategyId.ORIGINAL, StrategyId.RUS, StrategyId.SMOTE),
            cfg=ResampleConfig(perc_over=200),
            fcfg=ForestConfig(n_trees=6),
            K=3, R=2, seed=11,
        )
        serial = run_experiment(d, **kwargs, threads=1)
        parallel = run_experiment(d, **kwargs, threads=8)
        assert serial.means == parallel.means
        assert serial.avg_ranks == parallel.avg_ranks
        assert serial.friedman_statistic == parallel.friedman_statistic
        assert serial.best_strategy is parallel.best_strategy

    def test_select_best_accepts_report(self):
        d = small_dataset(1)
        report = run_experiment(
            d, (StrategyId.ORIGINAL, StrategyId.SMOTE), ResampleConfig(perc_over=200),
            ForestConfig(n_trees=4), K=3, R=1, seed=3,
        )
        assert select_best(report) is report.best_strategy

    def test_rank_block_count(self):
        d = small_dataset(9)
        report = run_experiment(
            d, (StrategyId.ORIGINAL, StrategyId.ROS), ResampleConfig(perc_over=200),
            ForestConfig(n_trees=4), K=3, R=2, seed=2,
        )
        # blocks = 8 metrics x R repetitions; CD is computed from that count
        assert report.nemenyi_cd == pytest.approx(nemenyi_cd(2, 16))

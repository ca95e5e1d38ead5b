"""Repeated stratified-CV comparison of resampling strategies.

For every (repetition, fold, strategy) work item the training portion is
resampled, a forest is trained on it and the untouched test fold is scored
with the full metric suite. Per-repetition metric means form the ranking
blocks (one block per metric x repetition); average ranks feed a Friedman
test and a Nemenyi critical difference, and the lowest average rank wins.

Work items are independent and may run on a thread pool; seeds are derived
per item, so results do not depend on the degree of parallelism.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .dataset import Dataset, FoldPlan, stratified_folds
from .errors import DataError
from .forest import ForestConfig, predict_proba, train
from .metrics import MetricReport, metric_suite, midranks
from .resample import EVALUATION_STRATEGIES, ResampleConfig, StrategyId, apply

EVAL_METRICS = (
    "accuracy",
    "precision_macro",
    "recall_min",
    "f_measure",
    "g_mean",
    "auc",
    "op",
    "iba",
)

# Two-tailed Nemenyi q values (infinite df) for up to 10 compared strategies.
_Q_TABLE = {
    0.05: {2: 1.960, 3: 2.343, 4: 2.569, 5: 2.728, 6: 2.850, 7: 2.949, 8: 3.031, 9: 3.102, 10: 3.164},
    0.10: {2: 1.645, 3: 2.052, 4: 2.291, 5: 2.459, 6: 2.589, 7: 2.693, 8: 2.780, 9: 2.855, 10: 2.920},
}


def _derive_seed(*parts) -> int:
    state = np.random.SeedSequence([int(p) & 0xFFFFFFFF for p in parts]).generate_state(2)
    return int(state[0]) | (int(state[1]) << 32)


@dataclass(frozen=True)
class FoldOutcome:
    """One work item's result, also handed to the optional audit hook."""

    rep: int
    fold: int
    strategy: StrategyId
    train_indices: np.ndarray
    test_indices: np.ndarray
    n_train_resampled: int
    report: MetricReport


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    strategies: tuple[StrategyId, ...]
    metrics: tuple[str, ...]
    means: dict
    stds: dict
    fold_values: dict  # strategy token -> metric -> (R, K) array
    avg_ranks: dict
    friedman_statistic: float
    friedman_p: float
    nemenyi_cd: float
    best_strategy: StrategyId
    K: int
    R: int
    seed: int
    alpha: float


def rank_blocks(values, higher_is_better: bool = True) -> np.ndarray:
    """Rank each row of an (N blocks, k strategies) matrix, 1 = best, with
    tied values sharing the mean of their ranks."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError("expected an (N, k) value matrix")
    signed = -values if higher_is_better else values
    return np.vstack([midranks(row) for row in signed])


def friedman(ranks) -> tuple[float, float]:
    """Friedman chi-squared statistic and p-value from an (N, k) rank matrix."""
    ranks = np.asarray(ranks, dtype=np.float64)
    n_blocks, k = ranks.shape
    if n_blocks < 2 or k < 2:
        raise ValueError("Friedman test needs N >= 2 blocks and k >= 2 groups")
    avg = ranks.mean(axis=0)
    statistic = 12.0 * n_blocks / (k * (k + 1)) * (np.sum(avg**2) - k * (k + 1) ** 2 / 4.0)
    statistic = max(0.0, float(statistic))
    p = float(chi2.sf(statistic, k - 1))
    return statistic, p


def nemenyi_cd(k: int, n_blocks: int, alpha: float = 0.05) -> float:
    """Critical average-rank difference q_alpha(k) * sqrt(k(k+1)/(6N))."""
    try:
        q = _Q_TABLE[alpha][k]
    except KeyError:
        raise ValueError(f"no tabulated q for k={k}, alpha={alpha}") from None
    return float(q * np.sqrt(k * (k + 1) / (6.0 * n_blocks)))


def _evaluate_item(d, plan: FoldPlan, rep, fold, strategy, cfg, fcfg, seed, alpha):
    train_idx = plan.train_indices(rep, fold)
    test_idx = plan.test_indices(rep, fold)
    train_d = d.take(train_idx)
    resampled = apply(strategy, train_d, cfg.with_seed(_derive_seed(seed, 400, rep, fold)))
    model = train(resampled, fcfg.with_seed(_derive_seed(seed, 500, rep, fold, strategy.value)))
    proba = predict_proba(model, d.features[test_idx])
    predicted = np.where(proba >= 0.5, model.minority_label, model.majority_label).astype(object)
    report = metric_suite(d.labels[test_idx], predicted, proba, d.minority_label, alpha=alpha)
    return FoldOutcome(rep, fold, strategy, train_idx, test_idx, resampled.n, report)


def select_best(report_or_ranks, means: dict | None = None, strategies=None) -> StrategyId:
    """Lowest average rank; ties fall back to mean IBA, then mean OP, then
    the fixed strategy order. Accepts an :class:`ExperimentReport` or the
    (avg_ranks, means, strategies) triple."""
    if isinstance(report_or_ranks, ExperimentReport):
        report = report_or_ranks
        return select_best(report.avg_ranks, report.means, report.strategies)
    avg_ranks = report_or_ranks

    def sort_key(s: StrategyId):
        token = s.token
        return (avg_ranks[token], -means[token]["iba"], -means[token]["op"], s.value)

    return sorted(strategies, key=sort_key)[0]


def run_experiment(
    d: Dataset,
    strategies=EVALUATION_STRATEGIES,
    cfg: ResampleConfig = ResampleConfig(),
    fcfg: ForestConfig = ForestConfig(),
    K: int = 10,
    R: int = 5,
    seed: int = 0,
    alpha: float = 0.1,
    threads: int = 1,
    on_fold=None,
) -> ExperimentReport:
    """Full protocol: resample training folds only, score untouched test folds.

    ``on_fold`` receives every :class:`FoldOutcome` in deterministic
    (rep, fold, strategy) order once all items finish; it is the audit and
    progress surface.
    """
    strategies = tuple(strategies)
    if not strategies:
        raise DataError("no strategies selected")
    plan = stratified_folds(d, K, R, seed)
    items = [
        (rep, fold, strategy)
        for rep in range(R)
        for fold in range(K)
        for strategy in strategies
    ]

    def work(item):
        rep, fold, strategy = item
        return _evaluate_item(d, plan, rep, fold, strategy, cfg, fcfg, seed, alpha)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(work, items))
    else:
        outcomes = [work(item) for item in items]
    outcomes.sort(key=lambda o: (o.rep, o.fold, o.strategy.value))
    if on_fold is not None:
        for outcome in outcomes:
            on_fold(outcome)

    fold_values = {
        s.token: {m: np.zeros((R, K)) for m in EVAL_METRICS} for s in strategies
    }
    for o in outcomes:
        values = o.report.as_dict()
        for m in EVAL_METRICS:
            fold_values[o.strategy.token][m][o.rep, o.fold] = values[m]

    means = {
        s.token: {m: float(fold_values[s.token][m].mean()) for m in EVAL_METRICS}
        for s in strategies
    }
    stds = {
        s.token: {
            m: float(fold_values[s.token][m].std(ddof=1)) if K * R > 1 else 0.0
            for m in EVAL_METRICS
        }
        for s in strategies
    }

    # One ranking block per (metric, repetition): per-repetition fold means.
    blocks = np.array(
        [
            [fold_values[s.token][m][rep].mean() for s in strategies]
            for m in EVAL_METRICS
            for rep in range(R)
        ]
    )
    ranks = rank_blocks(blocks, higher_is_better=True)
    avg_ranks = {s.token: float(r) for s, r in zip(strategies, ranks.mean(axis=0))}
    if len(strategies) >= 2 and len(ranks) >= 2:
        statistic, p = friedman(ranks)
        cd = nemenyi_cd(len(strategies), len(ranks)) if len(strategies) in _Q_TABLE[0.05] else float("nan")
    else:
        statistic, p, cd = 0.0, 1.0, float("nan")
    best = select_best(avg_ranks, means, strategies)
    return ExperimentReport(
        strategies=strategies,
        metrics=EVAL_METRICS,
        means=means,
        stds=stds,
        fold_values=fold_values,
        avg_ranks=avg_ranks,
        friedman_statistic=statistic,
        friedman_p=p,
        nemenyi_cd=cd,
        best_strategy=best,
        K=K,
        R=R,
        seed=int(seed),
        alpha=alpha,
    )

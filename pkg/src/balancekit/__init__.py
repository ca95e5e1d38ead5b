"""balancekit: imbalanced-data profiling, resampling, evaluation and
strategy recommendation for binary classification."""

from .dataset import (
    Dataset,
    FoldPlan,
    SynthSpec,
    load_csv,
    load_keel,
    make_imbalanced,
    min_max_normalize,
    stratified_folds,
    write_csv,
)
from .errors import BalanceKitError, DataError
from .evaluate import ExperimentReport, run_experiment
from .forest import ForestConfig, ForestModel, predict, predict_proba, train
from .metrics import ConfusionCounts, MetricReport, confusion, metric_suite
from .profiling import Profile, profile
from .recommend import Recommendation, RuleModel, builtin_models, recommend
from .resample import EVALUATION_STRATEGIES, ResampleConfig, StrategyId, apply
from .rules import Interval, Rule, apriori, equal_width_bins, mine_rules

__version__ = "0.1.0"

__all__ = [
    "BalanceKitError",
    "ConfusionCounts",
    "DataError",
    "Dataset",
    "EVALUATION_STRATEGIES",
    "ExperimentReport",
    "FoldPlan",
    "ForestConfig",
    "ForestModel",
    "Interval",
    "MetricReport",
    "Profile",
    "Recommendation",
    "ResampleConfig",
    "Rule",
    "RuleModel",
    "StrategyId",
    "SynthSpec",
    "apply",
    "apriori",
    "builtin_models",
    "confusion",
    "equal_width_bins",
    "load_csv",
    "load_keel",
    "make_imbalanced",
    "metric_suite",
    "min_max_normalize",
    "mine_rules",
    "predict",
    "predict_proba",
    "profile",
    "recommend",
    "run_experiment",
    "stratified_folds",
    "train",
    "write_csv",
]

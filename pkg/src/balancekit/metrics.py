"""Confusion-matrix rates and evaluation metrics, minority class positive.

Degenerate 0/0 rates are reported as 0 and named in the report's ``flags``
so downstream rank aggregation always has a total value set to work with.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np


@dataclass(frozen=True)
class ConfusionCounts:
    """tp/fn/tn/fp with the minority class as positive."""

    tp: int
    fn: int
    tn: int
    fp: int

    def __post_init__(self):
        if min(self.tp, self.fn, self.tn, self.fp) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def n(self) -> int:
        return self.tp + self.fn + self.tn + self.fp


@dataclass(frozen=True)
class MetricReport:
    accuracy: float
    precision_min: float
    precision_maj: float
    precision_macro: float
    recall_min: float
    recall_maj: float
    f_measure: float
    g_mean: float
    auc: float
    op: float
    iba: float
    alpha: float = 0.1
    flags: tuple[str, ...] = ()

    def as_dict(self) -> dict[str, float]:
        return {
            "accuracy": self.accuracy,
            "precision_min": self.precision_min,
            "precision_maj": self.precision_maj,
            "precision_macro": self.precision_macro,
            "recall_min": self.recall_min,
            "recall_maj": self.recall_maj,
            "f_measure": self.f_measure,
            "g_mean": self.g_mean,
            "auc": self.auc,
            "op": self.op,
            "iba": self.iba,
        }


def confusion(actual, predicted, minority_label) -> ConfusionCounts:
    actual = np.asarray([str(v) for v in actual])
    predicted = np.asarray([str(v) for v in predicted])
    if len(actual) != len(predicted) or len(actual) == 0:
        raise ValueError("actual and predicted must have equal non-zero length")
    pos = actual == str(minority_label)
    pred_pos = predicted == str(minority_label)
    return ConfusionCounts(
        tp=int(np.sum(pos & pred_pos)),
        fn=int(np.sum(pos & ~pred_pos)),
        tn=int(np.sum(~pos & ~pred_pos)),
        fp=int(np.sum(~pos & pred_pos)),
    )


def _ratio(num: int, den: int, flag: str, flags: list[str]) -> float:
    if den == 0:
        flags.append(flag)
        return 0.0
    return num / den


def rates(c: ConfusionCounts):
    """Accuracy, per-class precision/recall, macro precision and F-measure.

    Returns (values dict, degeneracy flags). F is the harmonic mean of
    minority precision and minority recall with equal weights.
    """
    flags: list[str] = []
    accuracy = (c.tp + c.tn) / c.n
    recall_min = _ratio(c.tp, c.tp + c.fn, "recall_min", flags)
    recall_maj = _ratio(c.tn, c.tn + c.fp, "recall_maj", flags)
    precision_min = _ratio(c.tp, c.tp + c.fp, "precision_min", flags)
    precision_maj = _ratio(c.tn, c.tn + c.fn, "precision_maj", flags)
    psum = precision_min + recall_min
    if psum == 0:
        flags.append("f_measure")
        f_measure = 0.0
    else:
        f_measure = 2 * precision_min * recall_min / psum
    values = {
        "accuracy": accuracy,
        "precision_min": precision_min,
        "precision_maj": precision_maj,
        "precision_macro": (precision_min + precision_maj) / 2,
        "recall_min": recall_min,
        "recall_maj": recall_maj,
        "f_measure": f_measure,
    }
    return values, tuple(flags)


def g_mean(c: ConfusionCounts) -> float:
    """Geometric mean of the true positive and true negative rates."""
    tpr = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    tnr = c.tn / (c.tn + c.fp) if c.tn + c.fp else 0.0
    return sqrt(tpr * tnr)


def op(c: ConfusionCounts) -> float:
    """Accuracy penalized by the normalized gap between TNR and TPR.

    When both rates are zero the penalty takes its worst value of 1.
    """
    tpr = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    tnr = c.tn / (c.tn + c.fp) if c.tn + c.fp else 0.0
    accuracy = (c.tp + c.tn) / c.n
    if tpr + tnr == 0:
        return accuracy - 1.0
    return accuracy - abs(tnr - tpr) / (tnr + tpr)


def iba(c: ConfusionCounts, alpha: float = 0.1, base: float | None = None) -> float:
    """(1 + alpha * (TPR - TNR)) times a base metric (G-mean by default)."""
    tpr = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    tnr = c.tn / (c.tn + c.fp) if c.tn + c.fp else 0.0
    if base is None:
        base = g_mean(c)
    dom = tpr - tnr
    return (1.0 + alpha * dom) * base


def midranks(values) -> np.ndarray:
    """Ranks 1..n ascending by value; tied values share the mean of their ranks."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def auc(actual, scores, minority_label) -> float:
    """Mann-Whitney AUC: fraction of (positive, negative) score pairs ordered
    correctly, counting ties as half."""
    actual = np.asarray([str(v) for v in actual])
    scores = np.asarray(scores, dtype=np.float64)
    pos = actual == str(minority_label)
    n_pos = int(pos.sum())
    n_neg = len(actual) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC undefined: one class absent")
    ranks = midranks(scores)
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2
    return float(u / (n_pos * n_neg))


def metric_suite(actual, predicted, scores, minority_label, alpha: float = 0.1) -> MetricReport:
    """All eleven metric fields computed from one set of predictions."""
    c = confusion(actual, predicted, minority_label)
    basic, flags = rates(c)
    flags = list(flags)
    tpr, tnr = basic["recall_min"], basic["recall_maj"]
    if tpr + tnr == 0:
        flags.append("op")
    try:
        auc_value = auc(actual, scores, minority_label)
    except ValueError:
        flags.append("auc")
        auc_value = 0.0
    gm = g_mean(c)
    return MetricReport(
        accuracy=basic["accuracy"],
        precision_min=basic["precision_min"],
        precision_maj=basic["precision_maj"],
        precision_macro=basic["precision_macro"],
        recall_min=tpr,
        recall_maj=tnr,
        f_measure=basic["f_measure"],
        g_mean=gm,
        auc=auc_value,
        op=op(c),
        iba=iba(c, alpha=alpha, base=gm),
        alpha=alpha,
        flags=tuple(flags),
    )

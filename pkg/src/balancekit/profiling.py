"""Dataset meta-features that drive strategy selection.

Five values per dataset: instance count, attribute count, imbalance ratio,
the percentage of borderline examples (vertices touching a cross-class edge
of the Euclidean MST) and the class-overlap percentage derived from the
maximum per-feature Fisher discriminant ratio. Distance-based measures are
computed on min-max normalized features.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, min_max_normalize
from .errors import DataError
from .neighbors import NeighborIndex, build_mst


@dataclass(frozen=True)
class Profile:
    n_instances: int
    n_attributes: int
    imbalance_ratio: float
    borderline_pct: float
    overlap_pct: float
    minority_label: str

    def meta_values(self) -> dict[str, float]:
        """Meta-feature values keyed by their canonical rule-item names."""
        return {
            "IR": self.imbalance_ratio,
            "#Instances": float(self.n_instances),
            "#Attributes": float(self.n_attributes),
            "BL%": self.borderline_pct,
            "OVL%": self.overlap_pct,
        }


META_FEATURES = ("IR", "#Instances", "#Attributes", "BL%", "OVL%")


def imbalance_ratio(d: Dataset) -> float:
    n_min, n_maj = d.class_counts()
    if n_min == 0 or n_maj == 0:
        raise DataError("imbalance ratio undefined: a class has zero instances")
    return n_maj / n_min


def overlap_pct(d: Dataset) -> float:
    """100 / (1 + max Fisher discriminant ratio) over all features.

    Per feature: (mean difference)^2 / (sum of class variances), sample
    variances with the n-1 denominator. A feature with zero variance in both
    classes is infinitely discriminating when the means differ and is skipped
    when they do not; a singleton class contributes zero variance.
    """
    norm = min_max_normalize(d)
    mask = norm.minority_mask()
    if mask.sum() == 0 or (~mask).sum() == 0:
        raise DataError("overlap requires both classes to be non-empty")
    a, b = norm.features[mask], norm.features[~mask]
    mean_gap = (a.mean(axis=0) - b.mean(axis=0)) ** 2

    def _var(rows):
        if rows.shape[0] < 2:
            return np.zeros(rows.shape[1])
        return rows.var(axis=0, ddof=1)

    var_sum = _var(a) + _var(b)
    best = 0.0
    usable = 0
    for gap, var in zip(mean_gap, var_sum):
        if var == 0.0:
            if gap == 0.0:
                continue  # degenerate and uninformative
            return 0.0  # perfectly separating feature
        usable += 1
        best = max(best, gap / var)
    if usable == 0:
        raise DataError("overlap undefined: every feature is degenerate")
    return float(100.0 / (1.0 + best))


def borderline_pct(d: Dataset) -> float:
    """Percentage of instances incident to a cross-class MST edge."""
    norm = min_max_normalize(d)
    index = NeighborIndex(norm.features, norm.labels, norm.minority_label)
    labels = norm.labels.astype(str)
    marked = np.zeros(d.n, dtype=bool)
    for edge in build_mst(index):
        if labels[edge.u] != labels[edge.v]:
            marked[edge.u] = True
            marked[edge.v] = True
    return float(100.0 * marked.sum() / d.n)


def profile(d: Dataset) -> Profile:
    return Profile(
        n_instances=d.n,
        n_attributes=d.p,
        imbalance_ratio=imbalance_ratio(d),
        borderline_pct=borderline_pct(d),
        overlap_pct=overlap_pct(d),
        minority_label=d.minority_label,
    )

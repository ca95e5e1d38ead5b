"""Resampling strategies for binary imbalanced training data.

Undersampling (RUS, CNN, ENN, TL, OSS), oversampling (ROS, SMOTE) and the
four SMOTE+cleaning hybrids. Every transformation is a pure function of
(dataset, config): each randomized operation draws from a generator derived
from (seed, operation), so the SMOTE stage inside a hybrid produces exactly
the synthetics plain SMOTE would, and cleaning only ever removes rows.

Neighbor searches run on min-max normalized copies of the data; generated
feature values live on the raw scale.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .dataset import Dataset, min_max_normalize
from .errors import DataError
from .neighbors import NeighborIndex, knn_classify


class StrategyId(enum.Enum):
    """The eight compared strategies plus the standalone cleaning methods."""

    ORIGINAL = 0
    RUS = 1
    ROS = 2
    SMOTE = 3
    SMOTE_OSS = 4
    SMOTE_CNN = 5
    SMOTE_ENN = 6
    SMOTE_TL = 7
    CNN = 8
    ENN = 9
    TL = 10
    OSS = 11

    @property
    def token(self) -> str:
        return self.name.lower().replace("_", "-")

    @property
    def display(self) -> str:
        if self.name.startswith("SMOTE_"):
            return "SMOTE + " + self.name.split("_", 1)[1]
        if self is StrategyId.ORIGINAL:
            return "Original"
        return self.name

    @classmethod
    def from_token(cls, token: str) -> "StrategyId":
        normalized = token.strip().lower().replace(" + ", "-").replace("_", "-")
        for member in cls:
            if member.token == normalized or member.display.lower() == token.strip().lower():
                return member
        raise ValueError(f"unknown strategy {token!r}")


EVALUATION_STRATEGIES = (
    StrategyId.ORIGINAL,
    StrategyId.RUS,
    StrategyId.ROS,
    StrategyId.SMOTE,
    StrategyId.SMOTE_OSS,
    StrategyId.SMOTE_CNN,
    StrategyId.SMOTE_ENN,
    StrategyId.SMOTE_TL,
)

# Per-operation stream tags; hybrids reuse the tag of each stage they run.
_TAG_BASE = 200


def _op_rng(seed, op: StrategyId):
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, _TAG_BASE + op.value])


@dataclass(frozen=True)
class ResampleConfig:
    """Knobs shared by all strategies; defaults follow the evaluated protocol:
    500% oversampling, 50% target minority share, k=6 (SMOTE), 1 (CNN), 3 (ENN)."""

    perc_over: int = 500
    perc_under_minority_share: float = 0.5
    k_smote: int = 6
    k_cnn: int = 1
    k_enn: int = 3
    seed: int = 0

    def with_seed(self, seed: int) -> "ResampleConfig":
        return replace(self, seed=int(seed))


def _class_indices(d: Dataset) -> tuple[np.ndarray, np.ndarray]:
    mask = d.minority_mask()
    return np.flatnonzero(mask), np.flatnonzero(~mask)


def rus(d: Dataset, cfg: ResampleConfig) -> Dataset:
    """Drop random majority rows until the minority share reaches the target.

    A no-op (with a RuntimeWarning) when the data is already at or above the
    target share.
    """
    min_idx, maj_idx = _class_indices(d)
    s = cfg.perc_under_minority_share
    if not 0 < s < 1:
        raise DataError("perc_under_minority_share must be in (0, 1)")
    if len(min_idx) / d.n >= s:
        warnings.warn(
            "minority share already at target; returning data unchanged",
            RuntimeWarning,
            stacklevel=2,
        )
        return d
    keep_maj = math.ceil(len(min_idx) * (1 - s) / s)
    rng = _op_rng(cfg.seed, StrategyId.RUS)
    kept = rng.choice(maj_idx, size=keep_maj, replace=False)
    retained = np.sort(np.concatenate([min_idx, kept]))
    return d.take(retained)


def ros(d: Dataset, cfg: ResampleConfig) -> Dataset:
    """Append perc_over/100 random exact copies per minority instance."""
    if cfg.perc_over < 100:
        raise DataError("perc_over must be >= 100")
    min_idx, _ = _class_indices(d)
    n_add = (cfg.perc_over // 100) * len(min_idx)
    rng = _op_rng(cfg.seed, StrategyId.ROS)
    picks = min_idx[rng.integers(0, len(min_idx), size=n_add)]
    feats = np.vstack([d.features, d.features[picks]])
    labels = np.concatenate([d.labels, d.labels[picks]])
    return d.replace(feats, labels)


def smote(d: Dataset, cfg: ResampleConfig) -> Dataset:
    """Interpolated minority oversampling.

    Each minority instance x contributes perc_over/100 synthetics, each drawn
    on the segment from x to one of its k nearest minority neighbors (k capped
    at n_min - 1, neighbors found in normalized space, ties by smaller index).
    """
    min_idx, _ = _class_indices(d)
    n_min = len(min_idx)
    if n_min < 2:
        raise DataError("SMOTE needs at least 2 minority instances; use ros instead")
    per_instance = cfg.perc_over // 100
    norm_pts = min_max_normalize(d).features[min_idx]
    raw_pts = d.features[min_idx]
    k = min(cfg.k_smote, n_min - 1)

    # k nearest minority neighbors of each minority point, self excluded.
    diff = norm_pts[:, None, :] - norm_pts[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(dist, np.inf)
    cols = np.broadcast_to(np.arange(n_min), (n_min, n_min))
    order = np.lexsort((cols, dist), axis=1)
    neighbor_rows = order[:, :k]

    rng = _op_rng(cfg.seed, StrategyId.SMOTE)
    synth = np.empty((n_min * per_instance, d.p))
    pos = 0
    for i in range(n_min):
        for _ in range(per_instance):
            nn = neighbor_rows[i][rng.integers(0, k)]
            u = rng.random()
            synth[pos] = raw_pts[i] + u * (raw_pts[nn] - raw_pts[i])
            pos += 1
    feats = np.vstack([d.features, synth])
    labels = np.concatenate([d.labels, np.array([d.minority_label] * len(synth), dtype=object)])
    return d.replace(feats, labels)


def _nearest_label(points, labels, orig_indices, q, k, minority_label) -> str:
    """k-NN vote over an explicit candidate pool, ties by (distance, original
    index) and vote ties to the minority label."""
    diff = points - q
    dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    order = np.lexsort((orig_indices, dist))[:k]
    votes: dict[str, int] = {}
    for i in order:
        votes[labels[i]] = votes.get(labels[i], 0) + 1
    best = max(votes.values())
    winners = sorted(v for v, c in votes.items() if c == best)
    if len(winners) > 1 and minority_label in winners:
        return minority_label
    return winners[0]


def cnn(d: Dataset, cfg: ResampleConfig) -> Dataset:
    """Condensed selection of the majority class.

    The retained set starts as all minority rows plus one random majority row;
    remaining majority rows are scanned in a fixed random order and added
    whenever the current set misclassifies them, until a full pass adds none.
    """
    min_idx, maj_idx = _class_indices(d)
    if len(min_idx) == 0 or len(maj_idx) == 0:
        raise DataError("CNN requires both classes")
    norm = min_max_normalize(d).features
    labels = d.labels.astype(str)
    rng = _op_rng(cfg.seed, StrategyId.CNN)
    seed_pos = rng.integers(0, len(maj_idx))
    scan = np.delete(maj_idx, seed_pos)
    rng.shuffle(scan)

    in_e = np.zeros(d.n, dtype=bool)
    in_e[min_idx] = True
    in_e[maj_idx[seed_pos]] = True
    changed = True
    while changed:
        changed = False
        for i in scan:
            if in_e[i]:
                continue
            pool = np.flatnonzero(in_e)
            predicted = _nearest_label(
                norm[pool], labels[pool], pool, norm[i], cfg.k_cnn, d.minority_label
            )
            if predicted != labels[i]:
                in_e[i] = True
                changed = True
    return d.take(np.flatnonzero(in_e))


def enn_removals(d: Dataset, cfg: ResampleConfig, clean_both_classes: bool = False) -> np.ndarray:
    """Indices the edited-nearest-neighbor rule would drop (single pass,
    decisions made against the original data)."""
    if d.n < cfg.k_enn + 1:
        raise DataError(f"ENN needs at least k+1 = {cfg.k_enn + 1} instances")
    norm = min_max_normalize(d)
    index = NeighborIndex(norm.features, norm.labels, d.minority_label)
    labels = d.labels.astype(str)
    remove = np.zeros(d.n, dtype=bool)
    for i in range(d.n):
        predicted = knn_classify(index, i, cfg.k_enn)
        if predicted != labels[i]:
            if clean_both_classes or labels[i] != d.minority_label:
                remove[i] = True
    return np.flatnonzero(remove)


def enn(d: Dataset, cfg: ResampleConfig, clean_both_classes: bool = False) -> Dataset:
    """Remove instances misclassified by the k-NN rule over the rest of the data.

    Standalone use removes only majority rows; hybrid cleaning removes either
    class.
    """
    remove = np.zeros(d.n, dtype=bool)
    remove[enn_removals(d, cfg, clean_both_classes)] = True
    kept = np.flatnonzero(~remove)
    labels = d.labels.astype(str)
    if len(kept) < 2 or len(set(labels[kept])) < 2:
        raise DataError("ENN removed an entire class; data too noisy for cleaning")
    return d.take(kept)


def _tomek_pairs(points: np.ndarray, labels: np.ndarray, chunk: int = 512) -> set[tuple[int, int]]:
    """Mutual-nearest cross-class pairs in the given coordinate space.

    A pair qualifies when no third point is strictly closer to either member,
    i.e. the pair distance equals both members' nearest-neighbor distance.
    """
    n = len(points)
    nnd = np.empty(n)
    for start in range(0, n, chunk):
        rows = slice(start, min(start + chunk, n))
        diff = points[rows, None, :] - points[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        for local, absolute in enumerate(range(rows.start, rows.stop)):
            dist[local, absolute] = np.inf
        nnd[rows] = dist.min(axis=1)
    links: set[tuple[int, int]] = set()
    for start in range(0, n, chunk):
        rows = slice(start, min(start + chunk, n))
        diff = points[rows, None, :] - points[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        for local, x in enumerate(range(rows.start, rows.stop)):
            candidates = np.flatnonzero((dist[local] <= nnd[x]) & (labels != labels[x]))
            for y in candidates:
                if dist[local, y] <= nnd[y]:
                    links.add((min(x, int(y)), max(x, int(y))))
    return links


def tomek_links(d: Dataset) -> set[tuple[int, int]]:
    """All cross-class pairs that are each other's nearest neighbor."""
    min_idx, maj_idx = _class_indices(d)
    if len(min_idx) == 0 or len(maj_idx) == 0:
        raise DataError("Tomek links require both classes")
    norm = min_max_normalize(d)
    return _tomek_pairs(norm.features, d.labels.astype(str))


def tl_removals(d: Dataset, remove_both: bool = False) -> np.ndarray:
    """Indices that Tomek-link cleaning would drop (sorted ascending)."""
    links = tomek_links(d)
    labels = d.labels.astype(str)
    remove = np.zeros(d.n, dtype=bool)
    for u, v in links:
        for i in (u, v):
            if remove_both or labels[i] != d.minority_label:
                remove[i] = True
    return np.flatnonzero(remove)


def tl(d: Dataset, remove_both: bool = False) -> Dataset:
    """Drop Tomek-link members: majority members only, or both on request."""
    remove = np.zeros(d.n, dtype=bool)
    remove[tl_removals(d, remove_both)] = True
    kept = np.flatnonzero(~remove)
    labels = d.labels.astype(str)
    if len(kept) < 2 or len(set(labels[kept])) < 2:
        raise DataError("Tomek cleaning removed an entire class")
    return d.take(kept)


def oss(d: Dataset, cfg: ResampleConfig) -> Dataset:
    """One-sided selection of the majority class.

    P starts as all minority rows plus one random majority row; the remaining
    majority rows are classified once by 1-NN over that fixed P and the
    misclassified ones join it. Majority members of Tomek links within P
    (computed in the parent dataset's normalized space) are then dropped.
    All minority rows survive throughout.
    """
    min_idx, maj_idx = _class_indices(d)
    if len(min_idx) == 0 or len(maj_idx) == 0:
        raise DataError("OSS requires both classes")
    norm = min_max_normalize(d).features
    labels = d.labels.astype(str)
    rng = _op_rng(cfg.seed, StrategyId.OSS)
    seed_pos = rng.integers(0, len(maj_idx))

    p_mask = np.zeros(d.n, dtype=bool)
    p_mask[min_idx] = True
    p_mask[maj_idx[seed_pos]] = True
    initial_pool = np.flatnonzero(p_mask)
    for i in maj_idx:
        if p_mask[i]:
            continue
        predicted = _nearest_label(
            norm[initial_pool], labels[initial_pool], initial_pool, norm[i], 1, d.minority_label
        )
        if predicted != labels[i]:
            p_mask[i] = True

    pool = np.flatnonzero(p_mask)
    links = _tomek_pairs(norm[pool], labels[pool])
    for a, b in links:
        for local in (a, b):
            i = pool[local]
            if labels[i] != d.minority_label:
                p_mask[i] = False
    kept = np.flatnonzero(p_mask)
    if len(set(labels[kept])) < 2:
        raise DataError("OSS cleaning removed the entire majority class")
    return d.take(kept)


def apply(strategy: StrategyId, d: Dataset, cfg: ResampleConfig) -> Dataset:
    """Run one strategy; hybrids oversample with SMOTE and then clean the
    augmented set (ENN/TL clean both classes, CNN/OSS run their own procedure)."""
    if strategy is StrategyId.ORIGINAL:
        return d
    if strategy is StrategyId.RUS:
        return rus(d, cfg)
    if strategy is StrategyId.ROS:
        return ros(d, cfg)
    if strategy is StrategyId.SMOTE:
        return smote(d, cfg)
    if strategy is StrategyId.CNN:
        return cnn(d, cfg)
    if strategy is StrategyId.ENN:
        return enn(d, cfg, clean_both_classes=False)
    if strategy is StrategyId.TL:
        return tl(d, remove_both=False)
    if strategy is StrategyId.OSS:
        return oss(d, cfg)
    augmented = smote(d, cfg)
    if strategy is StrategyId.SMOTE_CNN:
        return cnn(augmented, cfg)
    if strategy is StrategyId.SMOTE_ENN:
        return enn(augmented, cfg, clean_both_classes=True)
    if strategy is StrategyId.SMOTE_TL:
        return tl(augmented, remove_both=True)
    if strategy is StrategyId.SMOTE_OSS:
        return oss(augmented, cfg)
    raise ValueError(f"unhandled strategy {strategy}")

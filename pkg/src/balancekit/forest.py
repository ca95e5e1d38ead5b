"""Bagged CART forest used as the single evaluation classifier.

Plain Breiman-style bagging: each tree grows on a bootstrap sample, each
node considers a without-replacement sample of ``mtry`` features and takes
the split with the largest Gini impurity decrease, thresholds at midpoints
of adjacent observed values. Per-tree generators are derived from
(seed, tree index) so training is reproducible regardless of scheduling.
Trees cast hard class votes; the minority-vote fraction doubles as the
score used for AUC.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import DataError

DEFAULT_MTRY_GRID_LIMIT = 7  # grid {1..min(7, p)} when tuning is requested

_LEAF = -1


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    mtry: int | None = None  # None = floor(sqrt(p))
    max_depth: int | None = None  # None = unlimited
    min_split: int = 2
    seed: int = 0
    mtry_grid: tuple[int, ...] | None = None
    bootstrap: bool = True  # test hook; production use keeps bagging on

    def with_seed(self, seed: int) -> "ForestConfig":
        return ForestConfig(
            n_trees=self.n_trees,
            mtry=self.mtry,
            max_depth=self.max_depth,
            min_split=self.min_split,
            seed=int(seed),
            mtry_grid=self.mtry_grid,
            bootstrap=self.bootstrap,
        )


@dataclass(frozen=True, eq=False)
class ForestModel:
    """Trained forest. ``trees`` holds per-tree node tables; each node is
    (feature, threshold, left, right, minority_count, majority_count) with
    feature = -1 marking a leaf."""

    trees: tuple
    minority_label: str
    majority_label: str
    n_features: int
    mtry: int
    oob_estimate: float | None = None
    degenerate: bool = False


def _tree_rng(seed: int, tree_index: int):
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, 300, tree_index])


def _gini(n_min: float, n_maj: float) -> float:
    n = n_min + n_maj
    if n == 0:
        return 0.0
    pm = n_min / n
    pj = n_maj / n
    return 1.0 - pm * pm - pj * pj


def _best_split(X, y, rows, features):
    """Best (feature, threshold, weighted child impurity) over the sampled
    features; None when no candidate strictly reduces impurity."""
    y_node = y[rows]
    n = len(rows)
    total_min = int(y_node.sum())
    parent = _gini(total_min, n - total_min)
    best = None
    for f in features:
        xv = X[rows, f]
        order = np.argsort(xv, kind="stable")
        xs = xv[order]
        ys = y_node[order]
        cut_at = np.flatnonzero(xs[1:] > xs[:-1]) + 1
        if len(cut_at) == 0:
            continue
        cum_min = np.cumsum(ys)
        nl = cut_at.astype(np.float64)
        min_l = cum_min[cut_at - 1].astype(np.float64)
        nr = n - nl
        min_r = total_min - min_l
        gini_l = 1.0 - (min_l / nl) ** 2 - ((nl - min_l) / nl) ** 2
        gini_r = 1.0 - (min_r / nr) ** 2 - ((nr - min_r) / nr) ** 2
        weighted = (nl * gini_l + nr * gini_r) / n
        pos = int(np.argmin(weighted))  # ties: smallest threshold wins
        if weighted[pos] < parent and (best is None or weighted[pos] < best[2]):
            threshold = (xs[cut_at[pos] - 1] + xs[cut_at[pos]]) / 2.0
            best = (int(f), float(threshold), float(weighted[pos]))
    return best


def _grow_tree(X, y, rows, mtry, max_depth, min_split, rng):
    p = X.shape[1]
    nodes = []
    stack = [(rows, 0, 0)]
    nodes.append(None)  # root placeholder
    while stack:
        node_rows, node_id, depth = stack.pop()
        y_node = y[node_rows]
        n_min = int(y_node.sum())
        n_maj = len(node_rows) - n_min
        make_leaf = (
            n_min == 0
            or n_maj == 0
            or len(node_rows) < min_split
            or (max_depth is not None and depth >= max_depth)
        )
        split = None
        if not make_leaf:
            features = rng.choice(p, size=min(mtry, p), replace=False)
            split = _best_split(X, y, node_rows, features)
            make_leaf = split is None
        if make_leaf:
            nodes[node_id] = (_LEAF, 0.0, _LEAF, _LEAF, n_min, n_maj)
            continue
        f, threshold, _ = split
        mask = X[node_rows, f] <= threshold
        left_id = len(nodes)
        nodes.append(None)
        right_id = len(nodes)
        nodes.append(None)
        nodes[node_id] = (f, threshold, left_id, right_id, n_min, n_maj)
        stack.append((node_rows[~mask], right_id, depth + 1))
        stack.append((node_rows[mask], left_id, depth + 1))
    return tuple(nodes)


def _tree_votes(nodes, X) -> np.ndarray:
    """Per-row minority vote (1/0) of a single tree; leaf ties vote minority."""
    out = np.empty(len(X), dtype=np.int8)
    stack = [(0, np.arange(len(X)))]
    while stack:
        node_id, rows = stack.pop()
        if len(rows) == 0:
            continue
        f, threshold, left, right, n_min, n_maj = nodes[node_id]
        if f == _LEAF:
            out[rows] = 1 if n_min >= n_maj else 0
        else:
            mask = X[rows, f] <= threshold
            stack.append((left, rows[mask]))
            stack.append((right, rows[~mask]))
    return out


def _train_arrays(X, y, cfg: ForestConfig, mtry: int, want_oob: bool):
    n = len(X)
    trees = []
    oob_min = np.zeros(n, dtype=np.int64)
    oob_maj = np.zeros(n, dtype=np.int64)
    for t in range(cfg.n_trees):
        rng = _tree_rng(cfg.seed, t)
        if cfg.bootstrap:
            sample = rng.integers(0, n, size=n)
        else:
            sample = np.arange(n)
        nodes = _grow_tree(X, y, sample, mtry, cfg.max_depth, cfg.min_split, rng)
        trees.append(nodes)
        if want_oob:
            out = np.ones(n, dtype=bool)
            out[sample] = False
            oob_rows = np.flatnonzero(out)
            if len(oob_rows):
                votes = _tree_votes(nodes, X[oob_rows])
                oob_min[oob_rows] += votes
                oob_maj[oob_rows] += 1 - votes
    oob_acc = None
    if want_oob:
        seen = (oob_min + oob_maj) > 0
        if seen.any():
            pred_min = oob_min >= oob_maj  # vote tie goes to the minority class
            oob_acc = float(np.mean(pred_min[seen] == (y[seen] == 1)))
    return tuple(trees), oob_acc


def train_xy(X, labels, minority_label: str, majority_label: str,
             cfg: ForestConfig = ForestConfig()) -> ForestModel:
    """Grow the forest on raw arrays; optionally pick mtry by OOB accuracy.

    With ``mtry_grid`` set, one forest is trained per candidate and the
    grid value with the highest out-of-bag accuracy wins (ties: smaller
    mtry). Single-class training data yields a degenerate constant model.
    """
    if cfg.n_trees < 1:
        raise DataError("n_trees must be >= 1")
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray([str(v) for v in labels])
    if X.ndim != 2 or len(labels) != len(X) or len(X) < 2:
        raise DataError("training data must be an n x p matrix with n >= 2 labels")
    y = (labels == str(minority_label)).astype(np.int8)
    minority, majority = str(minority_label), str(majority_label)
    p = X.shape[1]
    if cfg.mtry is not None and not 1 <= cfg.mtry <= p:
        raise DataError(f"mtry must be in 1..{p}")

    if y.all() or not y.any():
        # Degenerate constant model: a single all-in-one leaf per tree.
        n_min = int(y.sum())
        leaf = ((_LEAF, 0.0, _LEAF, _LEAF, n_min, len(y) - n_min),)
        return ForestModel(
            trees=tuple(leaf for _ in range(cfg.n_trees)),
            minority_label=minority,
            majority_label=majority,
            n_features=p,
            mtry=cfg.mtry or max(1, int(np.sqrt(p))),
            degenerate=True,
        )

    if cfg.mtry_grid:
        grid = sorted(set(int(m) for m in cfg.mtry_grid))
        if any(m < 1 or m > p for m in grid):
            raise DataError(f"mtry_grid values must be in 1..{p}")
        best = None
        for m in grid:
            trees, oob_acc = _train_arrays(X, y, cfg, m, want_oob=True)
            score = -1.0 if oob_acc is None else oob_acc
            if best is None or score > best[0]:
                best = (score, m, trees, oob_acc)
        _, m, trees, oob_acc = best
        return ForestModel(trees, minority, majority, p, m, oob_estimate=oob_acc)

    mtry = cfg.mtry if cfg.mtry is not None else max(1, int(np.sqrt(p)))
    trees, _ = _train_arrays(X, y, cfg, mtry, want_oob=False)
    return ForestModel(trees, minority, majority, p, mtry)


def train(d: Dataset, cfg: ForestConfig = ForestConfig()) -> ForestModel:
    """Grow the forest on a dataset (see :func:`train_xy`)."""
    return train_xy(d.features, d.labels, d.minority_label, d.majority_label, cfg)


def predict_proba(m: ForestModel, X) -> np.ndarray:
    """Fraction of trees voting the minority class for each query point."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != m.n_features:
        raise DataError(f"query points must have {m.n_features} features")
    votes = np.zeros(len(X), dtype=np.int64)
    for nodes in m.trees:
        votes += _tree_votes(nodes, X)
    return votes / len(m.trees)


def predict(m: ForestModel, X) -> np.ndarray:
    """Minority label when at least half of the trees vote minority."""
    proba = predict_proba(m, X)
    out = np.where(proba >= 0.5, m.minority_label, m.majority_label)
    return out.astype(object)


def dump_model(m: ForestModel) -> str:
    """Debug dump: one line per node as tree/node/feature/threshold/counts.
    Internal format, version-tagged, not a compatibility surface."""
    lines = [
        "balancekit-forest v1",
        f"minority={m.minority_label} majority={m.majority_label} "
        f"p={m.n_features} mtry={m.mtry} trees={len(m.trees)}",
    ]
    for t, nodes in enumerate(m.trees):
        for i, (f, thr, left, right, n_min, n_maj) in enumerate(nodes):
            if f == _LEAF:
                lines.append(f"{t} {i} leaf {n_min} {n_maj}")
            else:
                lines.append(f"{t} {i} split f{f} {thr:.12g} -> {left} {right}")
    return "\n".join(lines) + "\n"

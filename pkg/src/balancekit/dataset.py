"""Binary-labeled datasets: ingestion, folds, normalization, synthesis.

A :class:`Dataset` is an immutable bundle of a numeric feature matrix, a
string label per row and a designated minority label. Loaders exist for
plain CSV (header row, label column by name) and for the '@'-header .dat
format used by the KEEL repository. Randomized operations (fold planning,
synthetic generation) are pure functions of their arguments and a seed.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError

# Fixed stream tags so each randomized operation draws from its own
# reproducible generator (see _rng).
_TAG_FOLDS = 101
_TAG_SYNTH = 102


def _rng(seed, *tags):
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, *tags])


@dataclass(frozen=True, eq=False)
class Dataset:
    """n x p numeric features with exactly two label values.

    ``minority_label`` must name the rarer class (ties allowed). Arrays are
    made read-only on construction; all operations return new instances.
    """

    features: np.ndarray
    labels: np.ndarray
    minority_label: str
    feature_names: tuple[str, ...]
    label_name: str = "label"

    def __post_init__(self):
        feats = np.ascontiguousarray(np.asarray(self.features, dtype=np.float64))
        labs = np.asarray([str(v) for v in self.labels], dtype=object)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs)
        object.__setattr__(self, "feature_names", tuple(str(n) for n in self.feature_names))
        if feats.ndim != 2:
            raise DataError("features must be a 2-D matrix")
        n, p = feats.shape
        if n < 2 or p < 1:
            raise DataError(f"dataset too small: n={n}, p={p}")
        if len(labs) != n:
            raise DataError("label count does not match row count")
        if len(self.feature_names) != p:
            raise DataError("feature name count does not match column count")
        if not np.all(np.isfinite(feats)):
            raise DataError("features contain missing or non-finite values")
        values = np.unique(labs.astype(str))
        if len(values) != 2:
            raise DataError(f"expected exactly two classes, found {len(values)}")
        if self.minority_label not in values:
            raise DataError(f"minority label {self.minority_label!r} not present in data")
        # The minority designation is a role, not a recount: oversampling may
        # legitimately leave the designated minority larger than the majority.
        feats.setflags(write=False)
        labs.setflags(write=False)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def p(self) -> int:
        return self.features.shape[1]

    @property
    def majority_label(self) -> str:
        values = np.unique(self.labels.astype(str))
        return str([v for v in values if v != self.minority_label][0])

    def minority_mask(self) -> np.ndarray:
        return self.labels.astype(str) == self.minority_label

    def class_counts(self) -> tuple[int, int]:
        """(minority count, majority count)."""
        m = int(self.minority_mask().sum())
        return m, self.n - m

    def take(self, indices) -> "Dataset":
        """Row subset/multiset by index, preserving the minority designation."""
        idx = np.asarray(indices, dtype=np.intp)
        feats = self.features[idx]
        labs = self.labels[idx]
        return Dataset(feats, labs, self.minority_label, self.feature_names, self.label_name)

    def replace(self, features, labels) -> "Dataset":
        return Dataset(features, labels, self.minority_label, self.feature_names, self.label_name)


@dataclass(frozen=True)
class FoldPlan:
    """Stratified fold assignments: one length-n row of fold ids per repetition."""

    assignments: np.ndarray  # shape (R, n), values in 0..K-1
    K: int
    R: int
    seed: int

    def test_indices(self, rep: int, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments[rep] == fold)

    def train_indices(self, rep: int, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments[rep] != fold)


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a two-cluster Gaussian dataset with a target imbalance ratio."""

    n: int
    p: int
    informative: int
    ir_target: float
    class_sep: float = 1.0
    noise_flip_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.informative > self.p or self.informative < 1:
            raise DataError("informative feature count must be in 1..p")
        if self.ir_target < 1:
            raise DataError("ir_target must be >= 1")
        if not 0 <= self.noise_flip_fraction < 1:
            raise DataError("noise_flip_fraction must be in [0, 1)")


def _detect_minority(labels, requested=None):
    values, counts = np.unique(np.asarray(labels, dtype=str), return_counts=True)
    if len(values) > 2:
        raise DataError(f"more than two classes: {sorted(values)}")
    if len(values) < 2:
        raise DataError("fewer than two classes present")
    if requested is not None:
        if requested not in values:
            raise DataError(f"label {requested!r} not present in data")
        counts_by = dict(zip(values, counts))
        other = [v for v in values if v != requested][0]
        if counts_by[str(requested)] > counts_by[other]:
            raise DataError(
                f"designated minority class {requested!r} outnumbers {other!r}"
            )
        return str(requested)
    # Rarer class wins; ties broken by lexicographic label order.
    order = np.lexsort((values, counts))
    return str(values[order[0]])


def load_csv(path, label_column: str, minority_label: str | None = None) -> Dataset:
    """Load a header+rows CSV with a named label column.

    All non-label cells must parse as real numbers; a bad cell is reported
    with its row number and column name. When ``minority_label`` is omitted
    the rarer class is used (ties: lexicographically smaller label).
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if label_column not in header:
            raise DataError(f"{path}: label column {label_column!r} not found")
        label_idx = header.index(label_column)
        feature_names = [h for i, h in enumerate(header) if i != label_idx]
        rows, labels = [], []
        for lineno, cells in enumerate(reader, start=2):
            if not cells or (len(cells) == 1 and not cells[0].strip()):
                continue
            if len(cells) != len(header):
                raise DataError(f"{path}: row {lineno} has {len(cells)} cells, expected {len(header)}")
            labels.append(cells[label_idx].strip())
            row = []
            for i, cell in enumerate(cells):
                if i == label_idx:
                    continue
                try:
                    row.append(float(cell))
                except ValueError:
                    raise DataError(
                        f"{path}: row {lineno}, column {header[i]!r}: "
                        f"non-numeric value {cell.strip()!r}"
                    ) from None
            rows.append(row)
    if not rows:
        raise DataError(f"{path}: empty dataset")
    minority = _detect_minority(labels, minority_label)
    return Dataset(np.array(rows, dtype=np.float64), np.array(labels, dtype=object),
                   minority, tuple(feature_names), label_name=label_column)


def load_keel(path, minority_label: str | None = None) -> Dataset:
    """Load a KEEL-style .dat file (@relation/@attribute/@inputs/@outputs/@data).

    The @outputs attribute supplies the labels; every input attribute must be
    numeric (nominal inputs are rejected).
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    attributes: list[tuple[str, bool]] = []  # (name, is_numeric)
    outputs: list[str] = []
    inputs: list[str] = []
    data_rows: list[list[str]] = []
    in_data = False
    for raw in lines:
        line = raw.strip()
        if not line:
            continue
        if in_data:
            data_rows.append([c.strip() for c in line.split(",")])
            continue
        low = line.lower()
        if low.startswith("@attribute"):
            rest = line[len("@attribute"):].strip()
            name = rest.split("{")[0].split("[")[0].split()[0].strip()
            is_numeric = "{" not in rest
            attributes.append((name, is_numeric))
        elif low.startswith("@inputs"):
            parts = line.split(None, 1)
            if len(parts) > 1:
                inputs = [t.strip() for t in parts[1].split(",")]
        elif low.startswith("@outputs") or low.startswith("@output"):
            parts = line.split(None, 1)
            if len(parts) > 1:
                outputs = [t.strip() for t in parts[1].split(",")]
        elif low.startswith("@data"):
            in_data = True
    if not in_data:
        raise DataError(f"{path}: no @data section")
    if not outputs:
        raise DataError(f"{path}: output attribute not declared")
    if len(outputs) != 1:
        raise DataError(f"{path}: expected a single output attribute")
    names = [a[0] for a in attributes]
    if outputs[0] not in names:
        raise DataError(f"{path}: output attribute {outputs[0]!r} not declared")
    if not inputs:
        inputs = [n for n in names if n != outputs[0]]
    for name in inputs:
        if name not in names:
            raise DataError(f"{path}: input attribute {name!r} not declared")
        if not attributes[names.index(name)][1]:
            raise DataError(f"{path}: non-numeric feature unsupported ({name!r})")
    if not data_rows:
        raise DataError(f"{path}: empty dataset")

    col_of = {n: i for i, n in enumerate(names)}
    out_idx = col_of[outputs[0]]
    in_idx = [col_of[n] for n in inputs]
    rows, labels = [], []
    for lineno, cells in enumerate(data_rows, start=1):
        if len(cells) != len(names):
            raise DataError(f"{path}: data row {lineno} has {len(cells)} cells, expected {len(names)}")
        labels.append(cells[out_idx])
        try:
            rows.append([float(cells[i]) for i in in_idx])
        except ValueError:
            raise DataError(f"{path}: data row {lineno}: non-numeric input value") from None
    minority = _detect_minority(labels, minority_label)
    return Dataset(np.array(rows, dtype=np.float64), np.array(labels, dtype=object),
                   minority, tuple(inputs), label_name=outputs[0])


def write_csv(d: Dataset, path) -> None:
    """Write a dataset as CSV, label as the final column, 12 significant digits."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(d.feature_names) + [d.label_name])
        for row, lab in zip(d.features, d.labels):
            writer.writerow([f"{v:.12g}" for v in row] + [str(lab)])


def stratified_folds(d: Dataset, K: int, R: int, seed: int) -> FoldPlan:
    """Assign each instance to one of K folds, per class, for R repetitions.

    Within every repetition each class is shuffled and dealt round-robin, so
    per-fold class counts differ by at most one.
    """
    if K < 2:
        raise DataError("fold count must be >= 2")
    if R < 1:
        raise DataError("repetition count must be >= 1")
    labels = d.labels.astype(str)
    for value in np.unique(labels):
        count = int((labels == value).sum())
        if count < K:
            raise DataError(
                f"class {value!r} has only {count} instances, fewer than {K} folds"
            )
    assignments = np.empty((R, d.n), dtype=np.intp)
    for rep in range(R):
        rng = _rng(seed, _TAG_FOLDS, rep)
        for value in np.unique(labels):
            idx = np.flatnonzero(labels == value)
            rng.shuffle(idx)
            assignments[rep, idx] = np.arange(len(idx)) % K
    assignments.setflags(write=False)
    return FoldPlan(assignments, K, R, int(seed))


def _split_sizes(n: int, ir_target: float) -> tuple[int, int]:
    # The ratio wins over the exact total: majority count is rounded to
    # within one instance of ir_target * minority count, so the realized
    # size can differ slightly from n when the two are incompatible.
    n_min = round(n / (1.0 + ir_target))
    if n_min < 1:
        raise DataError(
            f"n={n} too small to realize imbalance ratio {ir_target} "
            "with at least one minority instance"
        )
    n_maj = max(n_min, round(ir_target * n_min))
    return n_min, n_maj


def make_imbalanced_with_truth(spec: SynthSpec) -> tuple[Dataset, np.ndarray]:
    """Generate a synthetic dataset plus its pre-flip ground-truth labels.

    Two Gaussian clusters sit at +/-(class_sep/2) on each informative axis
    with unit variance; remaining features are standard-normal noise. Labels
    are 'positive' (minority) and 'negative'. Class sizes honor ir_target to
    within one instance, so the total can deviate slightly from n when the
    two are incompatible.
    """
    n_min, n_maj = _split_sizes(spec.n, spec.ir_target)
    total = n_min + n_maj
    rng = _rng(spec.seed, _TAG_SYNTH)
    X = rng.standard_normal((total, spec.p))
    offset = spec.class_sep / 2.0
    X[:n_maj, : spec.informative] -= offset
    X[n_maj:, : spec.informative] += offset
    truth = np.array(["negative"] * n_maj + ["positive"] * n_min, dtype=object)
    labels = truth.copy()
    if spec.noise_flip_fraction > 0:
        flip = rng.random(total) < spec.noise_flip_fraction
        swapped = np.where(truth[flip] == "positive", "negative", "positive")
        labels[flip] = swapped
    counts = {v: int((labels.astype(str) == v).sum()) for v in ("negative", "positive")}
    if 0 in counts.values():
        raise DataError("label flipping eliminated a class; lower noise_flip_fraction")
    minority = _detect_minority(labels)
    names = tuple(f"f{i}" for i in range(spec.p))
    return Dataset(X, labels, minority, names), truth


def make_imbalanced(spec: SynthSpec) -> Dataset:
    """Synthetic imbalanced dataset; see :func:`make_imbalanced_with_truth`."""
    return make_imbalanced_with_truth(spec)[0]


def min_max_normalize(d: Dataset) -> Dataset:
    """Affinely map every feature column to [0, 1]; constant columns go to 0.5."""
    feats = d.features
    lo = feats.min(axis=0)
    hi = feats.max(axis=0)
    span = hi - lo
    out = np.empty_like(feats)
    constant = span == 0
    nz = ~constant
    out[:, nz] = (feats[:, nz] - lo[nz]) / span[nz]
    out[:, constant] = 0.5
    return d.replace(out, d.labels)

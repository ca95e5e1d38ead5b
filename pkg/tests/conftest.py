import numpy as np
import pytest

from balancekit.dataset import Dataset


def build_dataset(features, labels, minority=None, names=None):
    features = np.atleast_2d(np.asarray(features, dtype=float))
    if features.shape[0] == 1 and len(labels) > 1:
        features = features.T
    labels = [str(v) for v in labels]
    if minority is None:
        values, counts = np.unique(labels, return_counts=True)
        order = np.lexsort((values, counts))
        minority = str(values[order[0]])
    if names is None:
        names = tuple(f"f{i}" for i in range(features.shape[1]))
    return Dataset(features, labels, minority, names)


@pytest.fixture
def toy_1d():
    """Minority pair near 0, majority cluster near 5."""
    return build_dataset([0.0, 0.1, 5.0, 5.1, 5.2], ["A", "A", "B", "B", "B"], minority="A")


def random_imbalanced(rng, n_min=None, n_maj=None, p=None):
    """Small random two-class dataset for oracle comparisons."""
    n_min = n_min or int(rng.integers(3, 10))
    n_maj = n_maj or int(rng.integers(n_min, 40))
    p = p or int(rng.integers(1, 4))
    X = np.vstack([
        rng.normal(0.0, 1.0, size=(n_maj, p)),
        rng.normal(1.0, 1.0, size=(n_min, p)),
    ])
    labels = ["neg"] * n_maj + ["pos"] * n_min
    return build_dataset(X, labels, minority="pos")

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from balancekit.dataset import (
    Dataset,
    SynthSpec,
    load_csv,
    load_keel,
    make_imbalanced,
    make_imbalanced_with_truth,
    min_max_normalize,
    stratified_folds,
    write_csv,
)
from balancekit.errors import DataError

from conftest import build_dataset


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestLoadCsv:
    def test_basic_load_and_auto_minority(self, tmp_path):
        path = write(tmp_path, "t.csv", "x,y,cls\n1,2,a\n3,4,a\n5,6,a\n7,8,b\n")
        d = load_csv(path, label_column="cls")
        assert (d.n, d.p) == (4, 2)
        assert d.minority_label == "b"
        assert d.feature_names == ("x", "y")

    def test_minority_tie_breaks_lexicographically(self, tmp_path):
        path = write(tmp_path, "t.csv", "x,cls\n1,b\n2,b\n3,a\n4,a\n")
        assert load_csv(path, label_column="cls").minority_label == "a"

    def test_more_than_two_classes_rejected(self, tmp_path):
        path = write(tmp_path, "t.csv", "x,cls\n1,a\n2,b\n3,c\n")
        with pytest.raises(DataError, match="two classes"):
            load_csv(path, label_column="cls")

    def test_non_numeric_cell_reports_location(self, tmp_path):
        path = write(tmp_path, "t.csv", "x,y,cls\n1,2,a\n3,oops,b\n")
        with pytest.raises(DataError, match=r"row 3.*'y'"):
            load_csv(path, label_column="cls")

    def test_missing_file_and_missing_label_column(self, tmp_path):
        with pytest.raises(DataError, match="cannot read"):
            load_csv(str(tmp_path / "absent.csv"), label_column="cls")
        path = write(tmp_path, "t.csv", "x,cls\n1,a\n2,b\n")
        with pytest.raises(DataError, match="label column"):
            load_csv(path, label_column="nope")

    def test_explicit_minority_must_be_rarer(self, tmp_path):
        path = write(tmp_path, "t.csv", "x,cls\n1,a\n2,a\n3,b\n")
        with pytest.raises(DataError, match="outnumbers"):
            load_csv(path, label_column="cls", minority_label="a")

    def test_round_trip_preserves_numbers(self, tmp_path):
        rng = np.random.default_rng(5)
        d = build_dataset(rng.normal(size=(20, 3)) * 1e3, ["a"] * 15 + ["b"] * 5)
        first = tmp_path / "a.csv"
        write_csv(d, first)
        loaded = load_csv(str(first), label_column="label")
        second = tmp_path / "b.csv"
        write_csv(loaded, second)
        assert first.read_text() == second.read_text()
        np.testing.assert_allclose(loaded.features, d.features, rtol=1e-11)

    def test_label_column_name_survives_round_trip(self, tmp_path):
        path = write(tmp_path, "t.csv", "x,cls\n1,a\n2,a\n3,b\n")
        d = load_csv(path, label_column="cls")
        out = tmp_path / "out.csv"
        write_csv(d, out)
        assert out.read_text().splitlines()[0] == "x,cls"


KEEL_SAMPLE = """@relation toy
@attribute a1 real [0.0, 10.0]
@attribute a2 integer [0, 5]
@attribute Class {positive, negative}
@inputs a1, a2
@outputs Class
@data
1.0, 2, negative
2.0, 3, negative
3.5, 1, negative
4.0, 0, positive
"""


class TestLoadKeel:
    def test_basic(self, tmp_path):
        d = load_keel(write(tmp_path, "toy.dat", KEEL_SAMPLE))
        assert (d.n, d.p) == (4, 2)
        assert d.minority_label == "positive"
        assert d.feature_names == ("a1", "a2")

    def test_empty_data_section(self, tmp_path):
        text = KEEL_SAMPLE.split("@data")[0] + "@data\n"
        with pytest.raises(DataError, match="empty dataset"):
            load_keel(write(tmp_path, "e.dat", text))

    def test_missing_data_section(self, tmp_path):
        text = KEEL_SAMPLE.split("@data")[0]
        with pytest.raises(DataError, match="no @data"):
            load_keel(write(tmp_path, "e.dat", text))

    def test_missing_outputs(self, tmp_path):
        text = KEEL_SAMPLE.replace("@outputs Class\n", "")
        with pytest.raises(DataError, match="output attribute not declared"):
            load_keel(write(tmp_path, "e.dat", text))

    def test_nominal_input_rejected(self, tmp_path):
        text = KEEL_SAMPLE.replace("@attribute a2 integer [0, 5]", "@attribute a2 {x, y}")
        text = text.replace(" 2,", " x,").replace(" 3,", " y,").replace(" 1,", " x,").replace(" 0,", " y,")
        with pytest.raises(DataError, match="non-numeric feature unsupported"):
            load_keel(write(tmp_path, "e.dat", text))


class TestStratifiedFolds:
    def test_exact_divisibility(self):
        d = build_dataset(np.arange(40).reshape(20, 2), ["m"] * 4 + ["M"] * 16, minority="m")
        plan = stratified_folds(d, K=4, R=1, seed=3)
        labels = d.labels.astype(str)
        for fold in range(4):
            test = plan.test_indices(0, fold)
            assert (labels[test] == "m").sum() == 1
            assert (labels[test] == "M").sum() == 4

    def test_determinism(self):
        d = build_dataset(np.arange(30).reshape(15, 2), ["m"] * 5 + ["M"] * 10, minority="m")
        a = stratified_folds(d, K=5, R=3, seed=11)
        b = stratified_folds(d, K=5, R=3, seed=11)
        assert np.array_equal(a.assignments, b.assignments)

    def test_minority_smaller_than_k(self):
        d = build_dataset(np.arange(20).reshape(10, 2), ["m"] * 3 + ["M"] * 7, minority="m")
        with pytest.raises(DataError, match="'m'"):
            stratified_folds(d, K=5, R=1, seed=0)

    @settings(max_examples=25, deadline=None)
    @given(
        n_min=st.integers(5, 30),
        ratio=st.integers(1, 6),
        K=st.integers(2, 5),
        R=st.integers(1, 3),
        seed=st.integers(0, 2**32 - 1),
    )
    def test_stratification_property(self, n_min, ratio, K, R, seed):
        n_maj = n_min * ratio
        d = build_dataset(
            np.arange((n_min + n_maj) * 2).reshape(-1, 2),
            ["m"] * n_min + ["M"] * n_maj,
            minority="m",
        )
        plan = stratified_folds(d, K=K, R=R, seed=seed)
        labels = d.labels.astype(str)
        for rep in range(R):
            seen = np.zeros(d.n, dtype=int)
            counts = []
            for fold in range(K):
                test = plan.test_indices(rep, fold)
                seen[test] += 1
                counts.append(int((labels[test] == "m").sum()))
            assert np.all(seen == 1)
            assert max(counts) - min(counts) <= 1
            assert all(abs(c - int(np.ceil(n_min / K))) <= 1 for c in counts)


class TestMakeImbalanced:
    def test_exact_ir(self):
        d = make_imbalanced(SynthSpec(n=310, p=3, informative=2, ir_target=30, seed=1))
        n_min, n_maj = d.class_counts()
        assert (n_min, n_maj) == (10, 300)

    def test_large_separation_is_nearly_separable(self):
        from balancekit.neighbors import NeighborIndex, knn_classify

        d = make_imbalanced(
            SynthSpec(n=200, p=4, informative=4, ir_target=4, class_sep=10.0, seed=9)
        )
        norm = min_max_normalize(d)
        index = NeighborIndex(norm.features, norm.labels, d.minority_label)
        correct = sum(
            knn_classify(index, i, 1) == str(d.labels[i]) for i in range(d.n)
        )
        assert correct / d.n >= 0.99

    def test_flip_fraction_within_3_sigma(self):
        spec = SynthSpec(n=1000, p=3, informative=2, ir_target=30,
                         noise_flip_fraction=0.05, seed=21)
        d, truth = make_imbalanced_with_truth(spec)
        flips = int(np.sum(d.labels.astype(str) != truth.astype(str)))
        sigma = np.sqrt(d.n * 0.05 * 0.95)
        assert abs(flips - 0.05 * d.n) <= 3 * sigma

    def test_determinism(self):
        spec = SynthSpec(n=100, p=3, informative=3, ir_target=5, seed=33)
        a, b = make_imbalanced(spec), make_imbalanced(spec)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels.astype(str), b.labels.astype(str))

    def test_too_small_rejected(self):
        with pytest.raises(DataError):
            make_imbalanced(SynthSpec(n=2, p=2, informative=1, ir_target=50, seed=0))


class TestNormalize:
    def test_simple_column(self):
        d = build_dataset([[0.0], [5.0], [10.0]], ["a", "a", "b"], minority="b")
        np.testing.assert_array_equal(
            min_max_normalize(d).features.ravel(), [0.0, 0.5, 1.0]
        )

    def test_constant_column_maps_to_half(self):
        d = build_dataset([[7.0, 1.0], [7.0, 2.0], [7.0, 3.0]], ["a", "a", "b"], minority="b")
        assert np.all(min_max_normalize(d).features[:, 0] == 0.5)

    def test_idempotent(self):
        rng = np.random.default_rng(2)
        d = build_dataset(rng.normal(size=(12, 4)), ["a"] * 8 + ["b"] * 4)
        once = min_max_normalize(d)
        twice = min_max_normalize(once)
        np.testing.assert_array_equal(once.features, twice.features)


class TestDatasetInvariants:
    def test_rejects_single_class(self):
        with pytest.raises(DataError):
            Dataset(np.zeros((3, 1)), ["a", "a", "a"], "a", ("x",))

    def test_rejects_nan(self):
        with pytest.raises(DataError, match="missing"):
            Dataset(np.array([[1.0], [np.nan]]), ["a", "b"], "a", ("x",))

    def test_immutable_features(self):
        d = build_dataset([[1.0], [2.0]], ["a", "b"], minority="a")
        with pytest.raises(ValueError):
            d.features[0, 0] = 9.0

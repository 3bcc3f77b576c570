import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fbtsvm.data import (
    BatchPlan, DataError, Dataset, batches, gen_blobs, gen_hyper, gen_sea, iter_batches,
    load, load_csv, load_libsvm, sea_label, stratified_split, write_csv, write_libsvm,
)


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_libsvm_dense_padding(tmp_path):
    d = load_libsvm(_write(tmp_path, "a.libsvm", "1 1:0.5 3:2.0\n2 2:1.0"))
    assert d.n == 3
    np.testing.assert_array_equal(d.X, [[0.5, 0, 2.0], [0, 1.0, 0]])
    assert list(d.y) == [1, 2]
    assert d.classes == (1, 2)


def test_libsvm_rows_padded_to_max_index(tmp_path):
    d = load_libsvm(_write(tmp_path, "b.libsvm", "1 3:1\n1 1:1 2:1 3:1"))
    assert d.X.shape == (2, 3)


def test_libsvm_empty_file(tmp_path):
    with pytest.raises(DataError, match="empty"):
        load_libsvm(_write(tmp_path, "e.libsvm", ""))


def test_libsvm_reports_line_number(tmp_path):
    with pytest.raises(DataError, match=":2:"):
        load_libsvm(_write(tmp_path, "m.libsvm", "1 1:1\n2 x:1\n"))
    with pytest.raises(DataError, match=":1:"):
        load_libsvm(_write(tmp_path, "m2.libsvm", "1 3:1 2:1\n"))


def test_csv_header_and_label_column(tmp_path):
    d = load_csv(_write(tmp_path, "a.csv", "a,b,y\n1,2,1\n3,4,2"), label_column=2)
    assert len(d) == 2 and d.n == 2
    d = load_csv(_write(tmp_path, "b.csv", "1,2,1"), label_column=0)
    assert d.y[0] == 1
    np.testing.assert_array_equal(d.X[0], [2, 1])


def test_csv_errors(tmp_path):
    with pytest.raises(DataError, match="ragged"):
        load_csv(_write(tmp_path, "r.csv", "1,2,1\n3,4"))
    with pytest.raises(DataError, match="non-numeric"):
        load_csv(_write(tmp_path, "n.csv", "1,2,1\n3,zz,2"))


def test_dataset_rejects_bad_values():
    with pytest.raises(DataError):
        Dataset(np.array([[np.nan, 1.0]]), np.array([1]))
    with pytest.raises(DataError):
        Dataset(np.zeros((1, 2)), np.array([0]))


def test_libsvm_and_csv_round_trip(tmp_path):
    d = gen_blobs(20, [[0, 0, 0], [3, 3, 3]], seed=4)
    write_libsvm(d, tmp_path / "d.libsvm")
    write_csv(d, tmp_path / "d.csv")
    for back in (load(tmp_path / "d.libsvm"), load(tmp_path / "d.csv")):
        np.testing.assert_array_equal(back.X, d.X)
        np.testing.assert_array_equal(back.y, d.y)


def test_stratified_split_proportions():
    X = np.arange(200.0).reshape(100, 2)
    d = Dataset(X, np.repeat([1, 2], 50))
    tr, te = stratified_split(d, 0.3, seed=1)
    assert [int(np.sum(te.y == c)) for c in (1, 2)] == [15, 15]
    tr2, te2 = stratified_split(d, 0.3, seed=1)
    np.testing.assert_array_equal(te.X, te2.X)
    with pytest.raises(DataError):
        stratified_split(Dataset(np.zeros((3, 1)), [1, 1, 2]), 0.3)


def test_batches_sizes():
    d = Dataset(np.arange(10.0).reshape(-1, 1), [1, 2] * 5)
    assert [len(b) for b in batches(d, BatchPlan(4))] == [4, 4, 2]
    (only,) = batches(d, BatchPlan(10, seed=3))
    assert sorted(only.X[:, 0]) == list(range(10))


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 5), st.integers(0, 10_000), st.integers(3, 8))
def test_first_batch_covers_every_class(k, seed, size):
    # one big class and k-1 singletons makes the coverage swap do real work
    y = np.concatenate([np.ones(40, dtype=int), np.arange(2, k + 1)])
    d = Dataset(np.arange(len(y), dtype=float).reshape(-1, 1), y)
    size = max(size, k)
    bs = batches(d, BatchPlan(size, seed))
    assert set(bs[0].classes) == set(d.classes)
    merged = np.sort(np.concatenate([b.X[:, 0] for b in bs]))
    np.testing.assert_array_equal(merged, np.arange(len(y)))


def test_iter_batches_keeps_file_order():
    d = Dataset(np.arange(7.0).reshape(-1, 1), [1] * 7)
    chunks = list(iter_batches(d, 3))
    assert [list(c.X[:, 0]) for c in chunks] == [[0, 1, 2], [3, 4, 5], [6]]


def test_hyper_noise_free_is_separable():
    d, (w, w0) = gen_hyper(2000, 10, 0.0, seed=5, return_plane=True)
    assert np.all(np.where(d.X @ w >= w0, 1, 2) == d.y)


def test_hyper_noise_fraction_against_stored_plane():
    d, (w, w0) = gen_hyper(10_000, 10, 0.1, seed=5, return_plane=True)
    disagree = np.mean(np.where(d.X @ w >= w0, 1, 2) != d.y)
    assert abs(disagree - 0.1) <= 0.02


def test_generators_are_deterministic():
    a, b = gen_hyper(300, 4, 0.2, seed=9), gen_hyper(300, 4, 0.2, seed=9)
    assert a.X.tobytes() == b.X.tobytes() and a.y.tobytes() == b.y.tobytes()
    a, b = gen_sea(300, 0.1, seed=2), gen_sea(300, 0.1, seed=2)
    assert a.X.tobytes() == b.X.tobytes() and a.y.tobytes() == b.y.tobytes()


def test_sea_labels():
    assert list(sea_label(np.array([[3, 4, 9], [6, 4, 0]]), 8.0)) == [1, 2]
    d = gen_sea(500, 0.0, seed=1)
    X = d.X.copy()
    X[:, 2] = np.random.default_rng(0).permutation(X[:, 2])
    np.testing.assert_array_equal(sea_label(X, 8.0), d.y)

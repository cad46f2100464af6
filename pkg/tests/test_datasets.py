import logging

import numpy as np
import pytest

from irig.harness.datasets import (
    LabeledDataset,
    batch_sizes,
    load_svmlight,
    parse_svmlight,
    partition_batches,
    write_svmlight,
)
from irig.harness.generators import synthetic_classification


def test_parse_single_line():
    d = parse_svmlight(["+1 3:0.5 7:1.2"])
    a, b = d.sample(0)
    assert b == 1.0 and a.nnz == 2
    np.testing.assert_array_equal(a.indices, [2, 6])
    np.testing.assert_array_equal(a.values, [0.5, 1.2])
    assert d.dim == 7


def test_empty_feature_row():
    d = parse_svmlight(["-1 ", "+1 2:1"])
    a, b = d.sample(0)
    assert b == -1.0 and a.nnz == 0


def test_dimension_from_max_index_and_override():
    d = parse_svmlight(["1 138921:1.0", "-1 5:2"])
    assert d.dim == 138921
    assert parse_svmlight(["1 3:1"], dim=10).dim == 10
    with pytest.raises(ValueError):
        parse_svmlight(["1 30:1"], dim=10)


def test_zero_labels_remapped(caplog):
    with caplog.at_level(logging.INFO):
        d = parse_svmlight(["0 1:1", "1 2:1", "# comment only", "-1 qid:3 1:2 # tail"])
    np.testing.assert_array_equal(d.labels, [-1.0, 1.0, -1.0])
    assert "remapped 1" in caplog.text


@pytest.mark.parametrize("lines, where", [
    (["1 1:1", "1 x:2"], "line 2"),
    (["1 1:1", "", "2 1:1"], "line 3"),
    (["1 0:1"], "line 1"),
    (["1 1:nan"], "line 1"),
    (["1 1"], "line 1"),
])
def test_malformed_lines_report_line_number(lines, where):
    with pytest.raises(ValueError, match=where):
        parse_svmlight(lines)


def test_empty_file(tmp_path):
    path = tmp_path / "empty.svm"
    path.write_text("# nothing\n\n")
    with pytest.raises(ValueError, match="no samples"):
        load_svmlight(path)


def test_write_load_roundtrip(tmp_path):
    A, labels = synthetic_classification(n=40, n_samples=30, nnz=3, seed=2)
    A = A.multiply(np.random.default_rng(0).uniform(0.1, 2.0, size=(1, 40))).tocsr()
    path = tmp_path / "d.svm"
    write_svmlight(path, LabeledDataset(A, labels))
    back = load_svmlight(path, dim=40)
    assert (back.A != A).nnz == 0
    np.testing.assert_array_equal(back.labels, labels)


@pytest.mark.parametrize("n, m, sizes", [(50000, 50, [1000] * 50), (10, 3, [4, 3, 3]), (5, 5, [1] * 5)])
def test_batch_sizes(n, m, sizes):
    assert batch_sizes(n, m) == sizes


@pytest.mark.parametrize("n, m", [(5, 6), (5, 0)])
def test_batch_errors(n, m):
    with pytest.raises(ValueError):
        batch_sizes(n, m)


def test_partition_preserves_every_sample():
    A, labels = synthetic_classification(n=25, n_samples=103, nnz=4, seed=8)
    d = LabeledDataset(A, labels)
    batches = partition_batches(d, 7)
    assert [len(b) for b in batches] == batch_sizes(103, 7)
    rows = []
    for b in batches:
        for i in range(len(b)):
            rows.append((tuple(b.A[i].indices), tuple(b.A[i].data), b.labels[i]))
    original = [(tuple(A[i].indices), tuple(A[i].data), labels[i]) for i in range(103)]
    assert rows == original


def test_labeled_dataset_validation():
    A, labels = synthetic_classification(n=5, n_samples=4, nnz=2)
    with pytest.raises(ValueError):
        LabeledDataset(A, labels[:3])
    with pytest.raises(ValueError):
        LabeledDataset(A, np.array([1.0, 2.0, 1.0, -1.0]))
    assert len(LabeledDataset(A, labels).samples) == 4

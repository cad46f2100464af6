"""svmlight/libsvm ingestion and contiguous batching into hinge components."""

from dataclasses import dataclass
import logging

import numpy as np
import scipy.sparse as sp

from irig.numerics import SparseVector
from irig.oracles import HingeBatch

log = logging.getLogger(__name__)

__all__ = ["LabeledDataset", "load_svmlight", "parse_svmlight", "write_svmlight",
           "partition_batches", "batch_sizes"]


@dataclass
class LabeledDataset:
    """Rows of a CSR matrix with labels in ``{-1, +1}``."""

    A: sp.csr_matrix
    labels: np.ndarray

    def __post_init__(self):
        self.A = sp.csr_matrix(self.A, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.float64)
        if self.A.shape[0] != self.labels.shape[0]:
            raise ValueError("one label per row is required")
        if not np.all(np.abs(self.labels) == 1.0):
            raise ValueError("labels must be -1 or +1")

    @property
    def dim(self):
        return self.A.shape[1]

    @property
    def n_samples(self):
        return self.A.shape[0]

    def __len__(self):
        return self.n_samples

    def sample(self, i):
        lo, hi = self.A.indptr[i], self.A.indptr[i + 1]
        return SparseVector(self.A.indices[lo:hi], self.A.data[lo:hi], self.dim), self.labels[i]

    @property
    def samples(self):
        return [self.sample(i) for i in range(self.n_samples)]


def _parse_label(tok, lineno):
    try:
        v = float(tok)
    except ValueError:
        raise ValueError(f"line {lineno}: bad label {tok!r}") from None
    if v == 1.0:
        return 1.0, False
    if v == -1.0:
        return -1.0, False
    if v == 0.0:
        return -1.0, True
    raise ValueError(f"line {lineno}: label must be +1, -1, 1 or 0, got {tok!r}")


def parse_svmlight(lines, dim=None):
    """Parse svmlight text lines (1-based feature indices)."""
    indptr = [0]
    indices, data, labels = [], [], []
    remapped = 0
    max_index = -1
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        label, was_zero = _parse_label(toks[0], lineno)
        remapped += was_zero
        row_idx, row_val = [], []
        for tok in toks[1:]:
            if tok.startswith("qid:"):
                continue
            idx_s, sep, val_s = tok.partition(":")
            try:
                if not sep:
                    raise ValueError
                j = int(idx_s)
                v = float(val_s)
            except ValueError:
                raise ValueError(f"line {lineno}: malformed feature {tok!r}") from None
            if j < 1:
                raise ValueError(f"line {lineno}: feature index must be >= 1, got {j}")
            if not np.isfinite(v):
                raise ValueError(f"line {lineno}: non-finite feature value")
            row_idx.append(j - 1)
            row_val.append(v)
        if row_idx:
            max_index = max(max_index, max(row_idx))
        indices.extend(row_idx)
        data.extend(row_val)
        indptr.append(len(indices))
        labels.append(label)
    if not labels:
        raise ValueError("svmlight input contains no samples")
    if remapped:
        log.info("remapped %d zero labels to -1", remapped)
    n = max_index + 1 if dim is None else int(dim)
    if max_index >= n:
        raise ValueError(f"feature index {max_index + 1} exceeds dimension {n}")
    A = sp.csr_matrix(
        (np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int64),
         np.asarray(indptr, dtype=np.int64)),
        shape=(len(labels), n),
    )
    # canonical rows: sorted indices, merged duplicates, no stored zeros
    A.sum_duplicates()
    A.eliminate_zeros()
    return LabeledDataset(A, np.asarray(labels))


def load_svmlight(path, dim=None):
    with open(path, encoding="utf-8") as fh:
        return parse_svmlight(fh, dim)


def write_svmlight(path, dataset):
    A = dataset.A
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for i in range(A.shape[0]):
            lo, hi = A.indptr[i], A.indptr[i + 1]
            feats = " ".join(f"{j + 1}:{v:.17g}" for j, v in zip(A.indices[lo:hi], A.data[lo:hi]))
            lab = "+1" if dataset.labels[i] > 0 else "-1"
            fh.write(f"{lab} {feats}".rstrip() + "\n")


def batch_sizes(n_samples, m):
    """Sizes of `m` contiguous batches; the first ``n_samples % m`` get one extra."""
    if m < 1:
        raise ValueError("m must be positive")
    if m > n_samples:
        raise ValueError(f"cannot split {n_samples} samples into {m} nonempty batches")
    base, extra = divmod(n_samples, m)
    return [base + 1 if i < extra else base for i in range(m)]


def partition_batches(d, m):
    """Split a dataset into `m` contiguous hinge-loss components."""
    sizes = batch_sizes(d.n_samples, m)
    out = []
    start = 0
    for size in sizes:
        out.append(HingeBatch(d.A[start:start + size], d.labels[start:start + size]))
        start += size
    return out

"""Dense and sparse vector arithmetic.

Dense vectors are plain 1-D ``float64`` numpy arrays.  Sparse vectors are
:class:`SparseVector` instances kept in a canonical form.  Reductions
accumulate in ascending index order so traces are bit-reproducible.
"""

import math

import numpy as np

__all__ = ["SparseVector", "as_dense", "dot", "axpy", "norms", "seq_sum"]


def as_dense(x, n=None, name="x"):
    """Return `x` as a finite 1-D float64 array, checking its dimension."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"{name} has dimension {arr.shape[0]}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def seq_sum(values):
    """Left-to-right sum of a 1-D array (numpy's own sum is pairwise)."""
    if len(values) == 0:
        return 0.0
    return float(np.cumsum(values)[-1])


class SparseVector:
    """Immutable sparse vector with strictly increasing indices.

    Construction canonicalizes: indices are sorted, duplicates are merged by
    summation and explicit zeros are dropped.

    Parameters
    ----------
    indices : array_like of int
        Non-negative coordinates, each ``< dim``.
    values : array_like of float
        Entries matching `indices`.
    dim : int
        Nominal dimension.
    """

    __slots__ = ("indices", "values", "dim")

    def __init__(self, indices, values, dim):
        idx = np.asarray(indices, dtype=np.int64).reshape(-1)
        val = np.asarray(values, dtype=np.float64).reshape(-1)
        dim = int(dim)
        if idx.shape != val.shape:
            raise ValueError("indices and values must have the same length")
        if dim < 0:
            raise ValueError("dimension must be non-negative")
        if idx.size and (idx.min() < 0 or idx.max() >= dim):
            raise ValueError(f"indices must lie in [0, {dim})")
        if not np.all(np.isfinite(val)):
            raise ValueError("values must be finite")
        if idx.size:
            order = np.argsort(idx, kind="stable")
            idx, val = idx[order], val[order]
            uniq, start = np.unique(idx, return_index=True)
            if uniq.size != idx.size:
                # merge duplicates in their stable order
                merged = np.array([seq_sum(v) for v in np.split(val, start[1:])])
                idx, val = uniq, merged
            keep = val != 0.0
            idx, val = idx[keep], val[keep]
        idx.flags.writeable = False
        val.flags.writeable = False
        self.indices = idx
        self.values = val
        self.dim = dim

    @classmethod
    def from_dense(cls, x):
        x = as_dense(x)
        nz = np.flatnonzero(x)
        return cls(nz, x[nz], x.shape[0])

    @classmethod
    def from_dict(cls, mapping, dim):
        keys = list(mapping)
        return cls(keys, [mapping[k] for k in keys], dim)

    @property
    def nnz(self):
        return int(self.indices.size)

    def to_dense(self):
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    def scaled(self, alpha):
        return SparseVector(self.indices, alpha * self.values, self.dim)

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.dim, self.indices.tobytes(), self.values.tobytes()))

    def __repr__(self):
        items = ", ".join(f"{i}: {v!r}" for i, v in zip(self.indices, self.values))
        return f"SparseVector({{{items}}}, dim={self.dim})"


def dot(a, x):
    """Inner product of a sparse vector with a dense vector.

    Products are accumulated in ascending index order.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != a.dim:
        raise ValueError(f"dimension mismatch: sparse {a.dim} vs dense {x.shape}")
    if a.nnz == 0:
        return 0.0
    return seq_sum(a.values * x[a.indices])


def axpy(alpha, g, x):
    """Return ``x + alpha * g``."""
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise ValueError("alpha must be finite")
    g = np.asarray(g, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if g.shape != x.shape or x.ndim != 1:
        raise ValueError(f"dimension mismatch: {g.shape} vs {x.shape}")
    out = x + alpha * g
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("axpy produced non-finite entries")
    return out


def norms(x):
    """Return ``(l1, l2)`` norms of a dense vector."""
    x = np.asarray(x, dtype=np.float64)
    l1 = seq_sum(np.abs(x))
    l2 = math.sqrt(seq_sum(x * x))
    return l1, l2

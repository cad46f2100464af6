"""Value-and-subgradient oracles for the lower-level components and the
strongly convex upper level, and the problem container tying them together.

At nondifferentiable points every oracle returns the zero-magnitude element
of the subdifferential (hinge margin exactly 1, ``|t|`` at 0, penalty on
the boundary ``q = 0``).
"""

from dataclasses import dataclass
import math

import numpy as np
import scipy.sparse as sp

from irig.geometry import FeasibleSet
from irig.numerics import SparseVector, as_dense, dot, seq_sum

__all__ = [
    "ComponentOracle",
    "UpperOracle",
    "AffineFunction",
    "AbsoluteAffine",
    "ConstraintPenalty",
    "HingeBatch",
    "ElasticNet",
    "ShiftedQuadratic",
    "ProblemInstance",
    "hinge_eval",
    "penalty_eval",
    "elastic_net_eval",
    "estimate_constants",
    "Constants",
]


class ComponentOracle:
    """A convex function ``R^n -> R`` with a deterministic subgradient."""

    dim: int

    def value(self, x):
        raise NotImplementedError

    def subgradient(self, x):
        raise NotImplementedError

    def evaluate(self, x):
        return self.value(x), self.subgradient(x)

    def _check(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1 or x.shape[0] != self.dim:
            raise ValueError(
                f"dimension mismatch: oracle has {self.dim}, vector has shape {x.shape}"
            )
        return x


class UpperOracle(ComponentOracle):
    """Strongly convex oracle; ``mu_h`` is the strong convexity modulus."""

    mu_h: float


class AffineFunction(ComponentOracle):
    """``q(x) = <c, x> - d``. Usable as the inner function of a penalty."""

    def __init__(self, c, d=0.0):
        if not isinstance(c, SparseVector):
            c = SparseVector.from_dense(as_dense(c, name="c"))
        self.c = c
        self.d = float(d)
        self.dim = c.dim

    def value(self, x):
        x = self._check(x)
        return dot(self.c, x) - self.d

    def subgradient(self, x):
        self._check(x)
        return self.c.to_dense()


class AbsoluteAffine(ComponentOracle):
    """``f(x) = |<c, x> - d|``; sign(0) is taken as 0."""

    def __init__(self, c, d=0.0):
        self.q = AffineFunction(c, d)
        self.dim = self.q.dim

    def value(self, x):
        return abs(self.q.value(x))

    def subgradient(self, x):
        t = self.q.value(x)
        g = np.zeros(self.dim)
        if t != 0.0:
            s = 1.0 if t > 0 else -1.0
            g[self.q.c.indices] = s * self.q.c.values
        return g


class ConstraintPenalty(ComponentOracle):
    """Exact penalty ``max{0, q(x)}`` of a convex constraint ``q(x) <= 0``.

    Parameters
    ----------
    q : ComponentOracle
        Convex scalar function; any object with ``value``, ``subgradient``
        and ``dim`` works.
    """

    def __init__(self, q):
        self.q = q
        self.dim = q.dim

    def value(self, x):
        return max(0.0, self.q.value(x))

    def subgradient(self, x):
        if self.q.value(x) > 0.0:
            return np.asarray(self.q.subgradient(x), dtype=np.float64)
        self._check(x)
        return np.zeros(self.dim)


class HingeBatch(ComponentOracle):
    """Sum of hinge losses ``max{0, 1 - b_j <x, a_j>}`` over a batch.

    Parameters
    ----------
    A : scipy.sparse matrix, shape (batch, n)
        Rows are the data vectors ``a_j``. Stored as canonical CSR.
    labels : array_like
        Entries in ``{-1, +1}``.
    """

    def __init__(self, A, labels):
        A = sp.csr_matrix(A, dtype=np.float64)
        A.sum_duplicates()
        A.eliminate_zeros()
        A.sort_indices()
        labels = np.asarray(labels, dtype=np.float64).reshape(-1)
        if A.shape[0] == 0:
            raise ValueError("hinge batch must be nonempty")
        if labels.shape[0] != A.shape[0]:
            raise ValueError("one label per row is required")
        if not np.all(np.abs(labels) == 1.0):
            raise ValueError("labels must be -1 or +1")
        self.A = A
        self._At = A.T.tocsr()
        self._At.sort_indices()
        self.labels = labels
        self.dim = A.shape[1]

    @classmethod
    def from_samples(cls, samples, dim=None):
        """Build from ``[(SparseVector, label), ...]``."""
        samples = list(samples)
        if not samples:
            raise ValueError("hinge batch must be nonempty")
        if dim is None:
            dim = samples[0][0].dim
        indptr = [0]
        indices, data, labels = [], [], []
        for a, b in samples:
            if a.dim != dim:
                raise ValueError("all samples must share one dimension")
            indices.append(a.indices)
            data.append(a.values)
            indptr.append(indptr[-1] + a.nnz)
            labels.append(b)
        A = sp.csr_matrix(
            (np.concatenate(data), np.concatenate(indices), np.asarray(indptr)),
            shape=(len(samples), dim),
        )
        return cls(A, labels)

    def __len__(self):
        return self.A.shape[0]

    def margins(self, x):
        x = self._check(x)
        return self.labels * (self.A @ x)

    def value(self, x):
        return seq_sum(np.maximum(0.0, 1.0 - self.margins(x)))

    def subgradient(self, x):
        coef = np.where(self.margins(x) < 1.0, -self.labels, 0.0)
        return self._scatter(coef)

    def _scatter(self, coef):
        # rows of A^T visit samples in ascending order: same accumulation
        # order as a row-by-row scatter
        return self._At @ coef


class ElasticNet(UpperOracle):
    """``h(x) = (mu_h/2)||x||^2 + ||x||_1``."""

    def __init__(self, mu_h, dim):
        self.mu_h = float(mu_h)
        if not self.mu_h > 0:
            raise ValueError("mu_h must be positive")
        self.dim = int(dim)

    def value(self, x):
        x = self._check(x)
        return 0.5 * self.mu_h * seq_sum(x * x) + seq_sum(np.abs(x))

    def subgradient(self, x):
        x = self._check(x)
        return self.mu_h * x + np.sign(x)


class ShiftedQuadratic(UpperOracle):
    """``h(x) = (mu/2)||x - center||^2``."""

    def __init__(self, center, mu=1.0):
        self.center = as_dense(center, name="center")
        self.mu_h = float(mu)
        if not self.mu_h > 0:
            raise ValueError("mu must be positive")
        self.dim = self.center.shape[0]

    def value(self, x):
        x = self._check(x)
        d = x - self.center
        return 0.5 * self.mu_h * seq_sum(d * d)

    def subgradient(self, x):
        x = self._check(x)
        return self.mu_h * (x - self.center)


def hinge_eval(batch, x):
    return batch.evaluate(x)


def penalty_eval(p, x):
    return p.evaluate(x)


def elastic_net_eval(e, x):
    return e.evaluate(x)


@dataclass
class ProblemInstance:
    """The bilevel problem: minimize ``upper`` over ``argmin_{X} sum(components)``.

    ``known_f_star`` and ``known_x_h_star`` are optional ground truth; when
    both are given they must agree.
    """

    components: list
    upper: UpperOracle
    feasible: FeasibleSet
    known_f_star: float = None
    known_x_h_star: np.ndarray = None
    f_star_estimated: bool = False
    consistency_tol: float = 1e-8

    def __post_init__(self):
        self.components = list(self.components)
        if not self.components:
            raise ValueError("at least one component is required")
        n = self.feasible.dim
        for i, c in enumerate(self.components):
            if c.dim != n:
                raise ValueError(f"component {i} has dimension {c.dim}, expected {n}")
        if self.upper.dim != n:
            raise ValueError(f"upper oracle has dimension {self.upper.dim}, expected {n}")
        if self.known_x_h_star is not None:
            self.known_x_h_star = as_dense(self.known_x_h_star, n, "known_x_h_star")
            if self.known_f_star is not None:
                fx = self.f(self.known_x_h_star)
                tol = self.consistency_tol * max(1.0, abs(self.known_f_star))
                if abs(fx - self.known_f_star) > tol:
                    raise ValueError(
                        f"f(known_x_h_star) = {fx!r} disagrees with known_f_star "
                        f"= {self.known_f_star!r}"
                    )

    @property
    def m(self):
        return len(self.components)

    @property
    def dim(self):
        return self.feasible.dim

    @property
    def mu_h(self):
        return self.upper.mu_h

    def f(self, x):
        total = 0.0
        for c in self.components:
            total += c.value(x)
        return total

    def f_subgradient(self, x):
        g = np.zeros(self.dim)
        for c in self.components:
            g += c.subgradient(x)
        return g

    def h(self, x):
        return self.upper.value(x)


@dataclass(frozen=True)
class Constants:
    """Sampled estimates of the bounding constants.

    All four are lower bounds on the true suprema over ``X`` (``M`` is the
    analytic radius bound and is exact for boxes and balls).
    """

    C_f: float
    C_h: float
    M: float
    M_h: float


def estimate_constants(p, sample_count, seed=0):
    """Estimate ``(C_f, C_h, M, M_h)`` for a problem by sampling ``X``.

    The sample is the set's extreme points plus `sample_count` random points.
    Random draws are nested in `sample_count`, so estimates never decrease as
    the sample grows.
    """
    if sample_count <= 0:
        raise ValueError("sample_count must be positive")
    rng = np.random.default_rng(seed)
    try:
        pts = np.vstack([p.feasible.extreme_points(), p.feasible.sample(sample_count, rng)])
    except NotImplementedError:
        raise ValueError(f"cannot sample feasible set {p.feasible!r}") from None
    C_f = C_h = M_h = 0.0
    for x in pts:
        for c in p.components:
            C_f = max(C_f, float(np.linalg.norm(c.subgradient(x))))
        C_h = max(C_h, float(np.linalg.norm(p.upper.subgradient(x))))
        M_h = max(M_h, abs(p.upper.value(x)))
    M = p.feasible.radius_bound()
    if not all(math.isfinite(v) for v in (C_f, C_h, M, M_h)):
        raise FloatingPointError("non-finite constant estimate")
    return Constants(C_f, C_h, M, M_h)

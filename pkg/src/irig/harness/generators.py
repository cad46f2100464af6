"""Problem generators with analytic ground truth where available."""

from dataclasses import dataclass, field
import logging

import numpy as np
import scipy.sparse as sp

from irig.geometry import Box
from irig.oracles import (
    AbsoluteAffine,
    AffineFunction,
    ConstraintPenalty,
    ElasticNet,
    ProblemInstance,
    ShiftedQuadratic,
)
from irig.solver import solve_regularized_reference

log = logging.getLogger(__name__)

__all__ = [
    "SelectionSpec",
    "ConstrainedSpec",
    "InfeasibleProblemError",
    "gen_selection_problem",
    "gen_constrained_problem",
    "p2",
    "project_onto_polyhedron",
    "synthetic_classification",
]


class InfeasibleProblemError(ValueError):
    pass


@dataclass
class SelectionSpec:
    """Ill-posed lower level ``sum_j mult_j |x_j|`` over a cube.

    The default is the two-dimensional instance used throughout the tests:
    ``f = 2|x_1|`` split into two components, ``X = [-2, 2]^2`` and
    ``h = 0.5 ||x - (1, 1.5)||^2``.
    """

    dim: int = 2
    multiplicities: tuple = (2, 0)
    half_width: float = 2.0
    upper: str = "quadratic"  # or "elastic_net"
    center: tuple = None  # (1, 1.5) in two dimensions, the origin otherwise
    mu: float = 1.0


@dataclass
class ConstrainedSpec:
    """Affine constraints ``<c_i, x> <= d_i`` inside a box.

    Each constraint becomes one component ``max{0, <c_i, x> - d_i}``.
    """

    constraints: list = field(default_factory=list)  # [(c_i, d_i), ...]
    lower: tuple = (-2.0, -2.0)
    upper_bounds: tuple = (2.0, 2.0)
    upper: str = "quadratic"
    center: tuple = (0.0, 0.0)
    mu: float = 1.0
    probe_lambda: float = 1e-3
    probe_iters: int = 20000
    probe_tol: float = 1e-2


def _upper(kind, center, mu, dim):
    if kind == "quadratic":
        center = np.asarray(center, float)
        if center.shape not in ((), (dim,)):
            raise ValueError(f"center has {center.size} entries, expected {dim}")
        return ShiftedQuadratic(np.broadcast_to(center, (dim,)), mu)
    if kind == "elastic_net":
        return ElasticNet(mu, dim)
    raise ValueError(f"unknown upper-level objective {kind!r}")


def gen_selection_problem(spec=None):
    spec = spec or SelectionSpec()
    n = spec.dim
    mult = tuple(int(v) for v in spec.multiplicities)
    if len(mult) != n or any(v < 0 for v in mult) or sum(mult) < 1:
        raise ValueError("multiplicities need one non-negative entry per coordinate, not all zero")
    if not spec.half_width > 0:
        raise ValueError("half_width must be positive")
    comps = []
    for j, k in enumerate(mult):
        e = np.zeros(n)
        e[j] = 1.0
        comps.extend(AbsoluteAffine(e) for _ in range(k))
    X = Box.cube(n, spec.half_width)
    center = spec.center
    if center is None:
        center = (1.0, 1.5) if n == 2 else (0.0,) * n
    h = _upper(spec.upper, center, spec.mu, n)
    # X* = {x in X : x_j = 0 where mult_j > 0}; h separates over coordinates
    free = np.array([k == 0 for k in mult])
    if spec.upper == "quadratic":
        xh = np.where(free, np.clip(h.center, X.lower, X.upper), 0.0)
    else:
        xh = np.zeros(n)
    return ProblemInstance(comps, h, X, known_f_star=0.0, known_x_h_star=xh)


def p2():
    return gen_selection_problem(SelectionSpec())


def project_onto_polyhedron(z, C, d, lower, upper, tol=1e-13, max_iter=200000):
    """Euclidean projection of `z` onto ``{C x <= d} ∩ [lower, upper]``.

    Dykstra's alternating projections over the halfspaces and the box.
    Returns None if it fails to converge (e.g. an empty intersection).
    """
    C = np.atleast_2d(np.asarray(C, float))
    d = np.asarray(d, float).reshape(-1)
    lower = np.asarray(lower, float)
    upper = np.asarray(upper, float)
    x = np.asarray(z, float).copy()
    sets = len(d) + 1
    incr = np.zeros((sets, x.size))
    for _ in range(max_iter):
        x_old = x.copy()
        for i in range(sets):
            y = x + incr[i]
            if i < len(d):
                c = C[i]
                viol = c @ y - d[i]
                x_new = y - (viol / (c @ c)) * c if viol > 0 else y
            else:
                x_new = np.clip(y, lower, upper)
            incr[i] = y - x_new
            x = x_new
        if np.max(np.abs(x - x_old)) < tol:
            feasible = np.all(C @ x <= d + 1e-9) and np.all(x >= lower - 1e-12) and np.all(x <= upper + 1e-12)
            return x if feasible else None
    return None


def gen_constrained_problem(spec):
    """Penalty reformulation of ``min h`` subject to affine constraints in a box."""
    if not spec.constraints:
        raise ValueError("at least one constraint is required")
    lower = np.asarray(spec.lower, float)
    upper_b = np.asarray(spec.upper_bounds, float)
    n = lower.size
    X = Box(lower, upper_b)
    comps = []
    C, d = [], []
    for c, di in spec.constraints:
        c = np.asarray(c, float)
        if c.shape != (n,) or not np.any(c):
            raise ValueError("each constraint needs a nonzero coefficient vector of length n")
        comps.append(ConstraintPenalty(AffineFunction(c, di)))
        C.append(c)
        d.append(float(di))
    h = _upper(spec.upper, spec.center, spec.mu, n)
    probe = ProblemInstance(comps, h, X)
    x_probe = solve_regularized_reference(probe, spec.probe_lambda, spec.probe_iters)
    if probe.f(x_probe) > spec.probe_tol:
        raise InfeasibleProblemError(
            f"no point of the box satisfies the constraints (probe f = {probe.f(x_probe):.3g})"
        )
    xh = None
    if spec.upper == "quadratic":
        xh = project_onto_polyhedron(h.center, C, d, lower, upper_b)
    return ProblemInstance(comps, h, X, known_f_star=0.0, known_x_h_star=xh)


def synthetic_classification(n=200, n_samples=2000, nnz=10, noise=0.05, seed=0):
    """Sparse binary-feature data labelled by a hidden linear rule.

    Each row has `nnz` distinct active features with value 1; labels are
    ``sign(<w, a>)`` for a Gaussian ``w``, each flipped with probability
    `noise`.

    Returns
    -------
    A : scipy.sparse.csr_matrix, shape (n_samples, n)
    labels : ndarray of +-1
    """
    if not 0 < nnz <= n:
        raise ValueError("nnz must lie in [1, n]")
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(n)
    indices = np.empty((n_samples, nnz), dtype=np.int64)
    for i in range(n_samples):
        indices[i] = np.sort(rng.choice(n, size=nnz, replace=False))
    data = np.ones(n_samples * nnz)
    indptr = np.arange(0, n_samples * nnz + 1, nnz)
    A = sp.csr_matrix((data, indices.ravel(), indptr), shape=(n_samples, n))
    score = A @ w
    labels = np.where(score >= 0, 1.0, -1.0)
    flip = rng.random(n_samples) < noise
    labels[flip] *= -1
    return A, labels

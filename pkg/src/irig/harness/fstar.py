"""Lower-level optimal value ``f* = min_X sum_i f_i`` for dataset problems."""

import logging

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from irig.geometry import Box
from irig.oracles import AbsoluteAffine, AffineFunction, ConstraintPenalty, HingeBatch
from irig.solver import solve_regularized_reference

log = logging.getLogger(__name__)

__all__ = ["lp_lower_optimum", "estimate_f_star"]


def _rows(comp, n):
    """Epigraph rows ``G [x; s] <= h`` for one component, plus its slack count."""
    if type(comp) is HingeBatch:
        # s_j >= 1 - b_j <a_j, x>
        k = comp.A.shape[0]
        G = sp.hstack([-sp.diags(comp.labels) @ comp.A, -sp.identity(k)])
        return G, -np.ones(k), k
    if type(comp) is ConstraintPenalty and type(comp.q) is AffineFunction:
        c = comp.q.c.to_dense()[None, :]
        return sp.hstack([sp.csr_matrix(c), -sp.identity(1)]), np.array([comp.q.d]), 1
    if type(comp) is AbsoluteAffine:
        c = comp.q.c.to_dense()[None, :]
        d = comp.q.d
        G = sp.vstack([sp.hstack([sp.csr_matrix(c), -sp.identity(1)]),
                       sp.hstack([sp.csr_matrix(-c), -sp.identity(1)])])
        return G, np.array([d, -d]), 1
    return None


def lp_lower_optimum(p):
    """Solve ``min_X f`` as a linear program, or return None if `p` is not
    piecewise linear over a box.

    Returns
    -------
    (f_star, x) : tuple
        Optimal value recomputed through the oracles, and a minimizer.
    """
    if not isinstance(p.feasible, Box):
        return None
    n = p.dim
    blocks, rhs, slacks = [], [], []
    for comp in p.components:
        rows = _rows(comp, n)
        if rows is None:
            return None
        G, h, k = rows
        blocks.append((G.tocsr(), k))
        rhs.append(h)
        slacks.append(k)
    total = sum(slacks)
    mats, off = [], 0
    for G, k in blocks:
        x_part = G[:, :n]
        s_part = G[:, n:]
        pad_l = sp.csr_matrix((G.shape[0], off))
        pad_r = sp.csr_matrix((G.shape[0], total - off - k))
        mats.append(sp.hstack([x_part, pad_l, s_part, pad_r]))
        off += k
    A_ub = sp.vstack(mats).tocsr()
    cost = np.concatenate([np.zeros(n), np.ones(total)])
    bounds = [(lo, hi) for lo, hi in zip(p.feasible.lower, p.feasible.upper)] + [(0, None)] * total
    res = linprog(cost, A_ub=A_ub, b_ub=np.concatenate(rhs), bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"LP for f* failed: {res.message}")
    x = p.feasible.project(res.x[:n])
    return p.f(x), x


def estimate_f_star(p, method="auto", lam=1e-4, iters=1_000_000, backend="auto"):
    """Estimate ``f*``.

    ``method="lp"`` solves the exact linear program (hinge, affine-penalty and
    absolute-affine components over a box).  ``"reference"`` evaluates ``f``
    at a regularized reference solution with a small `lam`; its value is an
    upper bound on ``f*`` that can be far off when `lam` is tiny and `iters`
    modest.  ``"auto"`` uses the LP when the problem allows it.
    """
    if method not in ("auto", "lp", "reference"):
        raise ValueError(f"unknown f* method {method!r}")
    if method in ("auto", "lp"):
        out = lp_lower_optimum(p)
        if out is not None:
            return out[0]
        if method == "lp":
            raise ValueError("problem is not a piecewise-linear program over a box")
        log.info("f* LP not applicable; falling back to a reference run")
    x = solve_regularized_reference(p, lam, iters, backend=backend)
    return p.f(x)

"""Backend selection for the hot loops.

The compiled extension ``irig._ckernels`` is used when it imports and the
problem is built only from oracle types it understands; otherwise the solver
drives the oracles from Python.  Set ``IRIG_PURE_PYTHON=1`` to disable the
extension at import.
"""

from dataclasses import dataclass
import logging
import os

import numpy as np

from irig.geometry import Ball2, Box
from irig.oracles import (
    AbsoluteAffine,
    AffineFunction,
    ConstraintPenalty,
    ElasticNet,
    HingeBatch,
    ShiftedQuadratic,
)

log = logging.getLogger(__name__)

ROW_HINGE, ROW_PLUS, ROW_ABS = 0, 1, 2
UPPER_QUAD, UPPER_ENET = 0, 1
SET_BOX, SET_BALL = 0, 1

if os.environ.get("IRIG_PURE_PYTHON", "").strip() not in ("", "0"):
    _ck = None
else:
    try:
        from irig import _ckernels as _ck
    except ImportError:  # extension not built
        _ck = None

HAVE_COMPILED = _ck is not None


@dataclass
class Plan:
    """Flat encoding of a problem for the compiled kernels."""

    n: int
    m: int
    comp_ptr: np.ndarray
    row_ptr: np.ndarray
    idx: np.ndarray
    val: np.ndarray
    row_kind: np.ndarray
    row_param: np.ndarray
    upper_kind: int
    upper_mu: float
    upper_center: np.ndarray
    set_kind: int
    lo: np.ndarray
    hi: np.ndarray
    ball_center: np.ndarray
    radius: float


def _component_rows(c):
    """Yield ``(kind, param, indices, values)`` rows, or None if unsupported."""
    if isinstance(c, HingeBatch):
        A = c.A
        return [
            (ROW_HINGE, float(b), A.indices[A.indptr[r]:A.indptr[r + 1]],
             A.data[A.indptr[r]:A.indptr[r + 1]])
            for r, b in enumerate(c.labels)
        ]
    if type(c) is ConstraintPenalty and type(c.q) is AffineFunction:
        return [(ROW_PLUS, c.q.d, c.q.c.indices, c.q.c.values)]
    if type(c) is AbsoluteAffine:
        return [(ROW_ABS, c.q.d, c.q.c.indices, c.q.c.values)]
    return None


def compile_plan(problem):
    """Encode `problem` for the compiled kernels; None if not representable."""
    n = problem.dim
    comp_ptr = [0]
    row_ptr = [0]
    idx, val, kinds, params = [], [], [], []
    for c in problem.components:
        rows = _component_rows(c)
        if rows is None:
            return None
        for kind, param, ri, rv in rows:
            kinds.append(kind)
            params.append(param)
            idx.append(np.asarray(ri, dtype=np.int64))
            val.append(np.asarray(rv, dtype=np.float64))
            row_ptr.append(row_ptr[-1] + len(ri))
        comp_ptr.append(len(kinds))

    up = problem.upper
    if type(up) is ShiftedQuadratic:
        upper_kind, upper_center = UPPER_QUAD, up.center
    elif type(up) is ElasticNet:
        upper_kind, upper_center = UPPER_ENET, np.zeros(n)
    else:
        return None

    X = problem.feasible
    zeros = np.zeros(n)
    if type(X) is Box:
        set_kind, lo, hi, center, radius = SET_BOX, X.lower, X.upper, zeros, 0.0
    elif type(X) is Ball2:
        set_kind, lo, hi, center, radius = SET_BALL, zeros, zeros, X.center, X.radius
    else:
        return None

    def f64(a):
        return np.ascontiguousarray(a, dtype=np.float64)

    return Plan(
        n=n,
        m=problem.m,
        comp_ptr=np.asarray(comp_ptr, dtype=np.int64),
        row_ptr=np.asarray(row_ptr, dtype=np.int64),
        idx=np.concatenate(idx) if idx else np.zeros(0, dtype=np.int64),
        val=np.concatenate(val) if val else np.zeros(0),
        row_kind=np.asarray(kinds, dtype=np.int32),
        row_param=np.asarray(params, dtype=np.float64),
        upper_kind=upper_kind,
        upper_mu=float(up.mu_h),
        upper_center=f64(upper_center),
        set_kind=set_kind,
        lo=f64(lo),
        hi=f64(hi),
        ball_center=f64(center),
        radius=float(radius),
    )


def select_plan(problem, backend):
    """Resolve a backend name to a plan (compiled) or None (Python)."""
    if backend not in ("auto", "compiled", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "python":
        return None
    if not HAVE_COMPILED:
        if backend == "compiled":
            raise RuntimeError("compiled kernels are not available")
        return None
    plan = compile_plan(problem)
    if plan is None:
        if backend == "compiled":
            raise RuntimeError("problem uses oracles the compiled kernels do not support")
        log.debug("problem not representable by compiled kernels; using Python loop")
    return plan


def irig_advance(plan, x, xbar, S, k_start, k_stop, schedule):
    s = schedule
    return _ck.irig_advance(plan, x, xbar, S, k_start, k_stop, s.gamma0, s.a, s.lambda0, s.b, s.r)


def reference_advance(plan, x, xbar, lam, step_c, mu_h, k_start, k_stop):
    _ck.reference_advance(plan, x, xbar, lam, step_c, mu_h, k_start, k_stop)

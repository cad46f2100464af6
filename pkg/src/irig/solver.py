"""The IR-IG iteration and a brute-force solver for the regularized problem.

One outer iteration of IR-IG visits the components in the fixed order
``1..m``; each inner step is a projected subgradient step on
``f_i + (lambda_k/m) h``.  The returned point is the running average of the
outer iterates with weights ``gamma_t**r``.
"""

from dataclasses import dataclass, field
import logging
import math
import time
from typing import NamedTuple, Optional

import numpy as np

from irig import _kernels
from irig.numerics import as_dense
from irig.schedules import validate

log = logging.getLogger(__name__)

__all__ = [
    "SolverState",
    "TraceRow",
    "Trace",
    "InvalidScheduleError",
    "inner_cycle",
    "update_average",
    "run_irig",
    "solve_regularized_reference",
    "reference_ladder",
    "reference_error_bound",
    "log_checkpoints",
]

FEASIBILITY_TOL = 1e-12


class InvalidScheduleError(ValueError):
    """The schedule fails admissibility and no override was given."""

    def __init__(self, report):
        self.report = report
        super().__init__("inadmissible schedule: " + "; ".join(report.violations))


@dataclass(frozen=True)
class SolverState:
    """Outer iterate ``x``, running average ``x_bar`` and weight sum ``S``."""

    k: int
    x: np.ndarray
    x_bar: np.ndarray
    S: float


class TraceRow(NamedTuple):
    k: int
    f_bar: float
    f_gap: Optional[float]
    h_bar: float
    dist_xstar: Optional[float]
    gamma_k: float
    lambda_k: float
    elapsed_s: Optional[float]


@dataclass
class Trace:
    """Per-outer-iteration metrics of one run, ordered by ``k``."""

    rows: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    final_state: Optional[SolverState] = None

    def __len__(self):
        return len(self.rows)

    def column(self, name):
        return [getattr(r, name) for r in self.rows]


def _check_step(gamma_k, lambda_k):
    for name, v in (("gamma_k", gamma_k), ("lambda_k", lambda_k)):
        if not (math.isfinite(v) and v > 0):
            raise ValueError(f"{name} must be positive and finite, got {v!r}")


def _cycle(x, p, gamma, lam, path=None):
    X = p.feasible
    up = p.upper
    t = lam / p.m
    for comp in p.components:
        gf = comp.subgradient(x)
        gh = up.subgradient(x)
        x = X.project(x - gamma * (gf + t * gh))
        if path is not None:
            path.append(x)
    return x


def inner_cycle(x_k, p, gamma_k, lambda_k, path=None):
    """One pass over all components starting from `x_k`; returns ``x_{k+1}``.

    If `path` is a list, every intermediate iterate ``x_{k,1..m}`` is
    appended to it.
    """
    _check_step(gamma_k, lambda_k)
    x = as_dense(x_k, p.dim, "x_k")
    return _cycle(x, p, float(gamma_k), float(lambda_k), path)


def update_average(state, x_next, gamma_next_pow_r):
    """Fold ``x_{k+1}`` with weight ``gamma_{k+1}**r`` into the running average."""
    w = float(gamma_next_pow_r)
    if not (w > 0 and math.isfinite(w)):
        raise ValueError(f"weight must be positive, got {w!r}")
    if not state.S > 0:
        raise ValueError("weight accumulator must be positive")
    x_next = as_dense(x_next, state.x_bar.shape[0], "x_next")
    S_new = state.S + w
    x_bar = (state.S * state.x_bar + w * x_next) / S_new
    return SolverState(state.k + 1, x_next, x_bar, S_new)


def _python_advance(p, s, x, xbar, S, k_start, k_stop):
    for k in range(k_start, k_stop):
        x = _cycle(x, p, s.gamma_at(k), s.lambda_at(k))
        w = s.gamma_at(k + 1) ** s.r
        S_new = S + w
        xbar = (S * xbar + w * x) / S_new
        S = S_new
    return x, xbar, S


def log_checkpoints(n_iter, count, start=1):
    """Roughly `count` log-spaced integers in ``[start, n_iter]``, plus 0 and `n_iter`."""
    if n_iter <= 0:
        return [0]
    start = max(1, min(start, n_iter))
    ks = np.unique(np.round(np.geomspace(start, n_iter, count)).astype(np.int64))
    return sorted({0, int(n_iter), *map(int, ks)})


def _checkpoints(n_iter, record_stride, record_at):
    if record_at is not None:
        ks = {int(k) for k in record_at if 0 <= int(k) <= n_iter}
    else:
        if record_stride < 1:
            raise ValueError("record_stride must be positive")
        ks = set(range(0, n_iter + 1, record_stride))
    ks.add(n_iter)
    return sorted(ks)


def run_irig(p, s, n_iter, x0, record_stride=1, *, record_at=None,
             override=False, backend="auto", wall_clock=True):
    """Run `n_iter` outer iterations of IR-IG.

    Parameters
    ----------
    p : ProblemInstance
    s : PowerSchedule
    n_iter : int
        Number of outer iterations ``N``.
    x0 : array_like
        Starting point; projected onto ``X`` (with a warning) if infeasible.
    record_stride : int
        Record a trace row every `record_stride` outer iterations.
    record_at : iterable of int, optional
        Explicit iterations to record instead of a stride.
    override : bool
        Run even if :func:`irig.schedules.validate` reports violations.
    backend : {"auto", "compiled", "python"}
    wall_clock : bool
        Record elapsed seconds; off gives byte-reproducible traces.

    Returns
    -------
    x_bar : ndarray
        The averaged iterate ``x_bar_N``.
    trace : Trace
    """
    n_iter = int(n_iter)
    if n_iter < 0:
        raise ValueError("n_iter must be non-negative")
    report = validate(s, p.m, p.mu_h)
    if not report.ok:
        if not override:
            raise InvalidScheduleError(report)
        log.warning("running with inadmissible schedule: %s", "; ".join(report.violations))
    x0 = as_dense(x0, p.dim, "x0")
    if not p.feasible.contains(x0, FEASIBILITY_TOL):
        log.warning("x0 is outside the feasible set; projecting it")
        x0 = p.feasible.project(x0)

    plan = _kernels.select_plan(p, backend)
    x = x0.copy()
    xbar = x0.copy()
    S = s.weight_at(0)
    trace = Trace(meta={
        "backend": "compiled" if plan is not None else "python",
        "f_star": p.known_f_star,
        "f_star_estimated": bool(p.f_star_estimated),
        "schedule": s,
        "n_iter": n_iter,
        "validation": report,
    })
    t0 = time.perf_counter()

    def record(k):
        f_bar = p.f(xbar)
        f_gap = f_bar - p.known_f_star if p.known_f_star is not None else None
        dist = None
        if p.known_x_h_star is not None:
            dist = float(np.linalg.norm(xbar - p.known_x_h_star))
        elapsed = time.perf_counter() - t0 if wall_clock else None
        trace.rows.append(TraceRow(
            k, f_bar, f_gap, p.h(xbar), dist, s.gamma_at(k), s.lambda_at(k), elapsed
        ))

    k = 0
    for cp in _checkpoints(n_iter, record_stride, record_at):
        if cp > k:
            if plan is not None:
                S = _kernels.irig_advance(plan, x, xbar, S, k, cp, s)
            else:
                x, xbar, S = _python_advance(p, s, x, xbar, S, k, cp)
            k = cp
        record(k)
    if not (np.all(np.isfinite(xbar)) and np.all(np.isfinite(x))):
        raise FloatingPointError("iterates became non-finite")
    trace.final_state = SolverState(n_iter, x.copy(), xbar.copy(), S)
    return xbar.copy(), trace


def solve_regularized_reference(p, lam, iters, *, x0=None, step_c=1.0, backend="auto"):
    """Approximate the minimizer of ``f + lam*h`` over ``X``.

    Plain projected subgradient with steps ``step_c / (mu_h*lam*(k+1))``;
    returns the uniform average of the points at which subgradients were
    taken.  Starts from `x0`, or from the projection of the origin.
    """
    lam = float(lam)
    if not (lam > 0 and math.isfinite(lam)):
        raise ValueError("lam must be positive")
    iters = int(iters)
    if iters < 1:
        raise ValueError("iters must be positive")
    if x0 is None:
        x = p.feasible.project(np.zeros(p.dim))
    else:
        x = p.feasible.project(as_dense(x0, p.dim, "x0"))
    xbar = x.copy()
    mu = p.mu_h
    plan = _kernels.select_plan(p, backend)
    if plan is not None:
        _kernels.reference_advance(plan, x, xbar, lam, step_c, mu, 0, iters)
        return xbar
    X, up = p.feasible, p.upper
    for k in range(iters):
        xbar = xbar + (x - xbar) / (k + 1)
        step = step_c / (mu * lam * (k + 1))
        g = p.f_subgradient(x) + lam * up.subgradient(x)
        x = X.project(x - step * g)
    return xbar


def reference_ladder(p, lambdas, iters, **kwargs):
    """Reference solutions along a sequence of ``lam`` values, warm-started."""
    out = []
    x0 = kwargs.pop("x0", None)
    for lam in lambdas:
        x0 = solve_regularized_reference(p, lam, iters, x0=x0, **kwargs)
        out.append(x0)
    return out


def reference_error_bound(p, lam, iters, constants):
    """A posteriori bound on ``||x_ref - x*_lam||`` for the reference solver
    with unit step constant.

    Uses ``gap <= G**2 (1 + ln K) / (2 mu K)`` for the averaged point with
    ``G = m C_f + lam C_h`` and ``mu = lam mu_h``, then strong convexity.
    Sampled constants underestimate the suprema, so treat this as an
    estimate.
    """
    G = p.m * constants.C_f + lam * constants.C_h
    mu = lam * p.mu_h
    return (G / mu) * math.sqrt((1.0 + math.log(iters)) / iters)

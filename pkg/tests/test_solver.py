import logging

import numpy as np
import pytest

from irig.bounds import recursive_bound
from irig.geometry import Ball2, Box
from irig.harness.datasets import LabeledDataset, partition_batches
from irig.harness.generators import ConstrainedSpec, gen_constrained_problem, synthetic_classification
from irig.oracles import (
    AbsoluteAffine,
    ConstraintPenalty,
    AffineFunction,
    ElasticNet,
    ProblemInstance,
    ShiftedQuadratic,
    estimate_constants,
)
from irig.schedules import PowerSchedule, rate_schedule
from irig.solver import (
    InvalidScheduleError,
    SolverState,
    inner_cycle,
    log_checkpoints,
    reference_error_bound,
    reference_ladder,
    run_irig,
    solve_regularized_reference,
    update_average,
)

from conftest import BACKENDS


def one_dim(m=1):
    return ProblemInstance([AbsoluteAffine([1.0]) for _ in range(m)],
                           ShiftedQuadratic([1.0]), Box([-1.0], [1.0]))


@pytest.mark.parametrize("x_k, expected", [(1.0, 0.5), (0.0, 0.1), (-1.0, -0.3)])
def test_inner_cycle_examples(x_k, expected):
    got = inner_cycle(np.array([x_k]), one_dim(), 0.5, 0.2)
    assert got[0] == pytest.approx(expected, abs=1e-15)


def test_inner_cycle_path_feasible(rng):
    A, labels = synthetic_classification(n=20, n_samples=60, nnz=4, seed=1)
    p = ProblemInstance(partition_batches(LabeledDataset(A, labels), 6), ElasticNet(0.1, 20),
                        Ball2(np.zeros(20), 0.5))
    path = []
    x = inner_cycle(p.feasible.project(rng.standard_normal(20)), p, 5.0, 1.0, path)
    assert len(path) == 6
    assert all(p.feasible.contains(z, 1e-12) for z in path)
    np.testing.assert_array_equal(path[-1], x)


def test_inner_cycle_rejects_bad_steps():
    with pytest.raises(ValueError):
        inner_cycle(np.zeros(1), one_dim(), 0.0, 1.0)
    with pytest.raises(ValueError):
        inner_cycle(np.zeros(1), one_dim(), 1.0, np.nan)
    with pytest.raises(ValueError):
        inner_cycle(np.zeros(2), one_dim(), 1.0, 1.0)


@pytest.mark.parametrize("S, xbar, w, x_next, S_new, xbar_new", [
    (1.0, 0.0, 1.0, 2.0, 2.0, 1.0),
    (2.0, 1.0, 0.5, 4.0, 2.5, 1.6),
])
def test_update_average_examples(S, xbar, w, x_next, S_new, xbar_new):
    st = update_average(SolverState(0, np.zeros(1), np.array([xbar]), S), np.array([x_next]), w)
    assert st.S == S_new and st.k == 1
    assert st.x_bar[0] == pytest.approx(xbar_new, abs=1e-15)


def test_update_average_vanishing_weight():
    st = update_average(SolverState(0, np.zeros(1), np.array([3.0]), 5.0), np.array([100.0]), 1e-9)
    assert abs(st.x_bar[0] - 3.0) <= 1e-7
    with pytest.raises(ValueError):
        update_average(st, np.array([1.0]), 0.0)


def test_zero_iterations_returns_x0(p2):
    x0 = np.array([0.3, -1.2])
    xbar, trace = run_irig(p2, rate_schedule(0.1, 1.0, 1.0), 0, x0)
    np.testing.assert_array_equal(xbar, x0)
    assert [r.k for r in trace.rows] == [0]


@pytest.mark.parametrize("backend", BACKENDS)
def test_p2_short_run(p2, backend):
    s = rate_schedule(0.1, 1.0, 1.0, 0.5)
    xbar, trace = run_irig(p2, s, 10_000, np.array([2.0, -2.0]), record_at=[10_000], backend=backend)
    assert np.linalg.norm(xbar - np.array([0.0, 1.5])) <= 0.1
    assert p2.f(xbar) - 0.0 <= 0.05
    st = trace.final_state
    assert p2.feasible.contains(st.x, 1e-12) and p2.feasible.contains(st.x_bar, 1e-12)
    expected_S = np.sum(s.gammas(10_001) ** s.r)
    assert st.S == pytest.approx(expected_S, rel=1e-9)


def test_invalid_schedule_needs_override(p2, caplog):
    bad = rate_schedule(0.1, 10.0, 1.0)
    with pytest.raises(InvalidScheduleError) as err:
        run_irig(p2, bad, 5, np.zeros(2))
    assert "gamma0*lambda0" in str(err.value)
    with caplog.at_level(logging.WARNING):
        run_irig(p2, bad, 5, np.zeros(2), override=True)
    assert "inadmissible" in caplog.text


def test_infeasible_start_is_projected(p2, caplog):
    with caplog.at_level(logging.WARNING):
        _, trace = run_irig(p2, rate_schedule(0.1, 1.0, 1.0), 0, np.array([10.0, -10.0]))
    assert "projecting" in caplog.text
    np.testing.assert_array_equal(trace.final_state.x_bar, [2.0, -2.0])


def test_trace_columns(p2):
    _, trace = run_irig(p2, rate_schedule(0.1, 1.0, 1.0), 100, np.zeros(2), record_stride=25,
                        wall_clock=False)
    assert trace.column("k") == [0, 25, 50, 75, 100]
    assert all(v is None for v in trace.column("elapsed_s"))
    assert trace.column("gamma_k")[1] == pytest.approx(1.0 / 26**0.55)
    assert trace.meta["f_star"] == 0.0 and not trace.meta["f_star_estimated"]


def _problems():
    A, labels = synthetic_classification(n=30, n_samples=90, nnz=5, seed=4)
    clf = ProblemInstance(partition_batches(LabeledDataset(A, labels), 9), ElasticNet(0.1, 30),
                          Box.cube(30, 1e3))
    cons = gen_constrained_problem(ConstrainedSpec(constraints=[([1.0, 1.0], 1.0), ([1.0, -1.0], 1.0)]))
    ball = ProblemInstance([AbsoluteAffine([1.0, -1.0, 0.5], 0.2), ConstraintPenalty(AffineFunction([0, 1.0, 1.0], 0.3))],
                           ShiftedQuadratic([2.0, 1.0, -1.0], 0.5), Ball2([0.1, 0.2, 0.3], 1.0))
    return {"hinge": (clf, np.zeros(30)), "constrained": (cons, np.array([2.0, 2.0])),
            "ball": (ball, np.array([1.0, 1.0, 1.0]))}


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
@pytest.mark.parametrize("name", ["hinge", "constrained", "ball"])
def test_backends_bit_identical(name):
    p, x0 = _problems()[name]
    s = rate_schedule(0.15, 0.5, 1.0, 0.3)
    xa, ta = run_irig(p, s, 300, x0, record_stride=37, backend="python", wall_clock=False)
    xb, tb = run_irig(p, s, 300, x0, record_stride=37, backend="compiled", wall_clock=False)
    np.testing.assert_array_equal(xa, xb)
    assert ta.rows == tb.rows
    ra = solve_regularized_reference(p, 0.5, 500, backend="python")
    rb = solve_regularized_reference(p, 0.5, 500, backend="compiled")
    np.testing.assert_array_equal(ra, rb)


def test_unsupported_oracle_falls_back():
    p = ProblemInstance([ShiftedQuadratic([0.0])], ShiftedQuadratic([1.0]), Box([-1.0], [1.0]))
    _, trace = run_irig(p, rate_schedule(0.1, 1.0, 1.0), 3, np.zeros(1))
    assert trace.meta["backend"] == "python"
    if len(BACKENDS) == 2:
        with pytest.raises(RuntimeError):
            run_irig(p, rate_schedule(0.1, 1.0, 1.0), 3, np.zeros(1), backend="compiled")


def test_deterministic(p2):
    s = rate_schedule(0.2, 1.0, 2.0, -1.0)
    a = run_irig(p2, s, 500, np.array([1.0, 1.0]), wall_clock=False)
    b = run_irig(p2, s, 500, np.array([1.0, 1.0]), wall_clock=False)
    np.testing.assert_array_equal(a[0], b[0])
    assert a[1].rows == b[1].rows


@pytest.mark.parametrize("lam, expected", [(1.0, (0.0, 1.5)), (4.0, (0.5, 1.5))])
def test_reference_examples(p2, lam, expected):
    x = solve_regularized_reference(p2, lam, 100_000)
    assert np.linalg.norm(x - np.array(expected)) <= 1e-2


def test_reference_two_quadratics():
    a, c = np.array([1.0, -1.0]), np.array([-0.5, 0.5])
    p = ProblemInstance([ShiftedQuadratic(a)], ShiftedQuadratic(c), Box.cube(2, 3.0))
    for lam in (0.3, 1.0, 3.0):
        x = solve_regularized_reference(p, lam, 20_000)
        # distance from the segment [a, c]
        t = np.clip((x - a) @ (c - a) / ((c - a) @ (c - a)), 0, 1)
        assert np.linalg.norm(x - (a + t * (c - a))) <= 1e-3
        np.testing.assert_allclose(x, (a + lam * c) / (1 + lam), atol=1e-3)


def test_reference_ladder_and_errors(p2):
    xs = reference_ladder(p2, [4.0, 2.0, 1.0], 20_000)
    assert len(xs) == 3
    assert abs(xs[0][0] - 0.5) < 2e-2 and abs(xs[2][0]) < 2e-2
    with pytest.raises(ValueError):
        solve_regularized_reference(p2, 0.0, 10)
    with pytest.raises(ValueError):
        solve_regularized_reference(p2, 1.0, 0)
    c = estimate_constants(p2, 100)
    assert reference_error_bound(p2, 1.0, 10**6, c) < reference_error_bound(p2, 1.0, 10**4, c)


def test_log_checkpoints():
    ks = log_checkpoints(10**5, 40)
    assert ks[0] == 0 and ks[-1] == 10**5 and ks == sorted(set(ks))
    assert log_checkpoints(0, 10) == [0]
    assert log_checkpoints(3, 50) == [0, 1, 2, 3]


def test_recursive_error_bound():
    """One-step recursion on a 1-D instance with two components.

    Iterates come from the solver, regularized minimizers from the reference
    solver; the slack 1e-2 absorbs the reference error.
    """
    p = ProblemInstance([AbsoluteAffine([1.0]), AbsoluteAffine([1.0], 0.5)],
                        ShiftedQuadratic([1.5]), Box([-2.0], [2.0]))
    s = rate_schedule(0.1, 1.0, 4.0)
    consts = estimate_constants(p, 500)
    for k in (3, 6):
        _, tr = run_irig(p, s, k, np.array([-2.0]), record_at=[k])
        x_k = tr.final_state.x
        x_next = inner_cycle(x_k, p, s.gamma_at(k), s.lambda_at(k))
        lam_prev, lam_k = s.lambda_at(k - 1), s.lambda_at(k)
        x_prev_star = solve_regularized_reference(p, lam_prev, 200_000)
        x_star = solve_regularized_reference(p, lam_k, 200_000)
        lhs = float(np.sum((x_next - x_star) ** 2))
        rhs = recursive_bound(float(np.sum((x_k - x_prev_star) ** 2)), s.gamma_at(k), lam_k,
                              lam_prev, p.m, p.mu_h, consts)
        assert lhs <= rhs + 1e-2

import numpy as np
import pytest

from irig.harness.config import (
    ConfigError,
    build_problem,
    build_schedule,
    build_x0,
    checkpoints_for,
    parse_config,
    parse_constraints,
)

P2_TEXT = """
[problem]
kind = selection

[schedule]
epsilon = 0.1
gamma0 = 1
lambda0 = 1

[run]
iterations = 100
x0 = 2 -2
record = stride:10
"""


def test_p2_config():
    cfg = parse_config(P2_TEXT)
    p = build_problem(cfg)
    np.testing.assert_array_equal(p.known_x_h_star, [0.0, 1.5])
    s = build_schedule(cfg, p.m, p.mu_h)
    assert (s.a, s.b, s.r) == (0.55, pytest.approx(0.4), 0.5)
    np.testing.assert_array_equal(build_x0(cfg, 2), [2.0, -2.0])
    assert checkpoints_for(cfg) == list(range(0, 101, 10))


def test_defaults():
    cfg = parse_config("[problem]\nkind = selection\n")
    s = build_schedule(cfg, 50, 0.1)
    assert (s.gamma0, s.lambda0) == (1.0, 1.0)
    assert build_schedule(cfg, 2, 100.0).lambda0 == pytest.approx(0.04)
    assert cfg.backend == "auto" and cfg.wall_clock
    np.testing.assert_array_equal(build_x0(cfg, 3), np.zeros(3))


def test_explicit_exponents_and_const_x0():
    cfg = parse_config("[problem]\nkind=selection\n[schedule]\na=0.7\nb=0.2\nr=-1\n[run]\nx0=const:-10\n")
    s = build_schedule(cfg, 2, 1.0)
    assert (s.a, s.b, s.r) == (0.7, 0.2, -1.0)
    np.testing.assert_array_equal(build_x0(cfg, 2), [-10.0, -10.0])


@pytest.mark.parametrize("text, match", [
    ("[problem]\nkind=selection\nbogus=1\n", "unknown key"),
    ("[problem]\nkind=selection\n[extra]\n", "unknown section"),
    ("[run]\niterations=3\n", "missing \\[problem\\]"),
    ("[problem]\ndim=2\n", "kind"),
    ("[problem]\nkind=selection\n[schedule]\na=0.7\n", "together"),
    ("[problem]\nkind=selection\n[run]\niterations=-1\n", "non-negative"),
    ("[problem]\nkind=selection\n[run]\nrecord=every:3\n", "record"),
    ("[problem]\nkind=selection\n[run]\nbackend=gpu\n", "backend"),
    ("[problem]\nkind=selection\n[schedule]\ngamma0=abc\n", "number"),
    ("[problem]\nkind=selection\n[run]\nwall_clock=maybe\n", "boolean"),
    ("not an ini", "header"),
])
def test_config_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text)


@pytest.mark.parametrize("text", [
    "[problem]\nkind=teapot\n",
    "[problem]\nkind=constrained\n",
    "[problem]\nkind=classification\n",
    "[problem]\nkind=svmlight\nm=2\npath=/nonexistent/file.svm\n",
    "[problem]\nkind=selection\n[schedule]\nepsilon=0.7\n",
])
def test_unresolvable(text):
    cfg = parse_config(text)
    with pytest.raises(ConfigError):
        p = build_problem(cfg)
        build_schedule(cfg, p.m, p.mu_h)


def test_x0_dimension_mismatch():
    cfg = parse_config("[problem]\nkind=selection\n[run]\nx0=1 2 3\n")
    with pytest.raises(ConfigError):
        build_x0(cfg, 2)


def test_constraint_grammar():
    assert parse_constraints("1 1 <= 1; 1 -1 <= 1") == [([1.0, 1.0], 1.0), ([1.0, -1.0], 1.0)]
    with pytest.raises(ConfigError):
        parse_constraints("1 1 >= 1")
    with pytest.raises(ConfigError):
        parse_constraints(" ; ")


def test_constrained_config():
    cfg = parse_config("[problem]\nkind = constrained\nconstraints = -1 0 <= -1\n")
    p = build_problem(cfg)
    np.testing.assert_allclose(p.known_x_h_star, [1.0, 0.0], atol=1e-12)


def test_classification_config_with_estimated_f_star():
    cfg = parse_config(
        "[problem]\nkind=classification\nn=20\nsamples=60\nnnz=3\nm=6\nmu=0.1\n"
        "f_star_iters=2000\n"
    )
    p = build_problem(cfg)
    assert p.m == 6 and p.dim == 20 and p.f_star_estimated
    assert 0.0 <= p.known_f_star <= p.f(np.zeros(20))
    cfg = parse_config("[problem]\nkind=classification\nn=20\nsamples=60\nnnz=3\nm=6\nestimate_f_star=no\n")
    assert build_problem(cfg).known_f_star is None
    ref = parse_config("[problem]\nkind=classification\nn=20\nsamples=60\nnnz=3\nm=6\n"
                       "f_star_method=reference\nf_star_lambda=1e-2\nf_star_iters=2000\n")
    assert build_problem(ref).known_f_star >= p.known_f_star - 1e-9
    bad = parse_config("[problem]\nkind=classification\nn=20\nsamples=60\nnnz=3\nm=6\nf_star_method=oracle\n")
    with pytest.raises(ConfigError):
        build_problem(bad)


def test_svmlight_config(tmp_path):
    path = tmp_path / "d.svm"
    path.write_text("+1 1:1 3:1\n-1 2:1\n+1 3:2\n0 1:1\n")
    cfg = parse_config(f"[problem]\nkind=svmlight\npath={path}\nm=2\nf_star=0.5\n")
    p = build_problem(cfg)
    assert p.m == 2 and p.dim == 3 and p.known_f_star == 0.5 and not p.f_star_estimated


def test_bench_section():
    cfg = parse_config("[problem]\nkind=selection\n[bench]\nx0 = -1, 1\nsteps = 1:2, 3:4\nr = 0.5\nworkers = 2\n")
    assert cfg.bench.x0 == [-1.0, 1.0]
    assert cfg.bench.steps == [(1.0, 2.0), (3.0, 4.0)]
    assert cfg.bench.r == [0.5] and cfg.bench.workers == 2
    with pytest.raises(ConfigError):
        parse_config("[problem]\nkind=selection\n[bench]\nsteps = 1 2\n")

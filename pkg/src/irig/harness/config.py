"""Run configuration files.

INI-style sections of flat ``key = value`` pairs; unknown sections or keys
are errors.  See the README for the full grammar.
"""

import configparser
from dataclasses import dataclass, field, replace
import logging
import math

import numpy as np

from irig.geometry import Box
from irig.oracles import ElasticNet, ProblemInstance
from irig.schedules import PowerSchedule, rate_schedule
from irig.solver import log_checkpoints

log = logging.getLogger(__name__)

__all__ = ["ConfigError", "RunConfig", "BenchGrid", "load_config", "parse_config",
           "build_problem", "build_schedule", "build_x0", "checkpoints_for"]


class ConfigError(ValueError):
    pass


PROBLEM_KEYS = {
    "kind", "dim", "multiplicities", "half_width", "upper", "center", "mu",
    "constraints", "lower", "upper_bounds",
    "n", "samples", "nnz", "noise", "m", "path",
    "f_star", "estimate_f_star", "f_star_method", "f_star_lambda", "f_star_iters",
}
SCHEDULE_KEYS = {"gamma0", "lambda0", "epsilon", "a", "b", "r", "override"}
RUN_KEYS = {"iterations", "x0", "record", "seed", "backend", "wall_clock"}
OUTPUT_KEYS = {"csv"}
BENCH_KEYS = {"x0", "steps", "r", "workers", "out_dir"}
SECTIONS = {
    "problem": PROBLEM_KEYS,
    "schedule": SCHEDULE_KEYS,
    "run": RUN_KEYS,
    "output": OUTPUT_KEYS,
    "bench": BENCH_KEYS,
}


@dataclass
class BenchGrid:
    x0: list = field(default_factory=lambda: [-10.0, 0.0, 10.0])
    steps: list = field(default_factory=lambda: [(10.0, 1.0), (1.0, 10.0), (0.1, 0.1)])
    r: list = field(default_factory=lambda: [0.5, 0.0, -1.0])
    workers: int = 1
    out_dir: str = "bench_out"


@dataclass
class RunConfig:
    problem: dict
    gamma0: float = 1.0
    lambda0: float = None
    epsilon: float = 0.1
    a: float = None
    b: float = None
    r: float = 0.5
    override: bool = False
    iterations: int = 1000
    x0: str = "zero"
    record: str = "log:50"
    seed: int = 0
    backend: str = "auto"
    wall_clock: bool = True
    csv: str = None
    bench: BenchGrid = None


def _bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {s!r}")


def _float(s, key):
    try:
        v = float(s)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {s!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: must be finite")
    return v


def _int(s, key):
    try:
        return int(s)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {s!r}") from None


def _vector(s, key):
    try:
        return [float(t) for t in s.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"{key}: expected numbers separated by spaces") from None


def parse_constraints(s):
    """``"c11 c12 <= d1; c21 c22 <= d2"`` -> ``[(c_1, d_1), (c_2, d_2)]``."""
    out = []
    for part in s.split(";"):
        part = part.strip()
        if not part:
            continue
        lhs, sep, rhs = part.partition("<=")
        if not sep:
            raise ConfigError(f"constraint {part!r} must have the form 'c1 c2 ... <= d'")
        out.append((_vector(lhs, "constraints"), _float(rhs, "constraints")))
    if not out:
        raise ConfigError("constraints: at least one constraint is required")
    return out


def parse_config(text):
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    for sec in cp.sections():
        if sec not in SECTIONS:
            raise ConfigError(f"unknown section [{sec}]")
        unknown = set(cp[sec]) - SECTIONS[sec]
        if unknown:
            raise ConfigError(f"unknown key(s) in [{sec}]: {', '.join(sorted(unknown))}")
    if not cp.has_section("problem"):
        raise ConfigError("missing [problem] section")
    cfg = RunConfig(problem=dict(cp["problem"]))
    if "kind" not in cfg.problem:
        raise ConfigError("[problem] needs a 'kind'")
    if cp.has_section("schedule"):
        s = cp["schedule"]
        for key in ("gamma0", "lambda0", "epsilon", "a", "b", "r"):
            if key in s:
                setattr(cfg, key, _float(s[key], key))
        if "override" in s:
            cfg.override = _bool(s["override"])
        if ("a" in s) != ("b" in s):
            raise ConfigError("[schedule] a and b must be given together")
    if cp.has_section("run"):
        s = cp["run"]
        if "iterations" in s:
            cfg.iterations = _int(s["iterations"], "iterations")
            if cfg.iterations < 0:
                raise ConfigError("iterations must be non-negative")
        for key in ("x0", "record", "backend"):
            if key in s:
                setattr(cfg, key, s[key].strip())
        if "seed" in s:
            cfg.seed = _int(s["seed"], "seed")
        if "wall_clock" in s:
            cfg.wall_clock = _bool(s["wall_clock"])
    if cp.has_section("output") and "csv" in cp["output"]:
        cfg.csv = cp["output"]["csv"].strip()
    if cp.has_section("bench"):
        s = cp["bench"]
        grid = BenchGrid()
        if "x0" in s:
            grid.x0 = [_float(t, "x0") for t in s["x0"].split(",")]
        if "steps" in s:
            grid.steps = []
            for t in s["steps"].split(","):
                g, sep, l = t.partition(":")
                if not sep:
                    raise ConfigError("bench steps must look like 'gamma0:lambda0, ...'")
                grid.steps.append((_float(g, "steps"), _float(l, "steps")))
        if "r" in s:
            grid.r = [_float(t, "r") for t in s["r"].split(",")]
        if "workers" in s:
            grid.workers = max(1, _int(s["workers"], "workers"))
        if "out_dir" in s:
            grid.out_dir = s["out_dir"].strip()
        cfg.bench = grid
    checkpoints_for(cfg)  # validate the record spec early
    if cfg.backend not in ("auto", "compiled", "python"):
        raise ConfigError(f"backend must be auto, compiled or python, got {cfg.backend!r}")
    return cfg


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def checkpoints_for(cfg):
    kind, _, arg = cfg.record.partition(":")
    n = cfg.iterations
    if kind == "stride":
        stride = _int(arg, "record")
        if stride < 1:
            raise ConfigError("record stride must be positive")
        return sorted(set(range(0, n + 1, stride)) | {n})
    if kind == "log":
        count = _int(arg, "record")
        if count < 1:
            raise ConfigError("record log count must be positive")
        return log_checkpoints(n, count)
    raise ConfigError(f"record must be 'stride:<int>' or 'log:<int>', got {cfg.record!r}")


def build_schedule(cfg, m, mu_h):
    lambda0 = cfg.lambda0 if cfg.lambda0 is not None else min(1.0, 2.0 * m / mu_h)
    try:
        if cfg.a is not None:
            return PowerSchedule(cfg.gamma0, lambda0, cfg.a, cfg.b, cfg.r)
        return rate_schedule(cfg.epsilon, cfg.gamma0, lambda0, cfg.r)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def build_x0(cfg, n):
    spec = cfg.x0
    if spec == "zero":
        return np.zeros(n)
    if spec.startswith("const:"):
        return np.full(n, _float(spec[len("const:"):], "x0"))
    vec = _vector(spec, "x0")
    if len(vec) != n:
        raise ConfigError(f"x0 has {len(vec)} entries, problem dimension is {n}")
    return np.asarray(vec)


def _get(P, key, conv, default=None):
    if key in P:
        return conv(P[key], key)
    if default is None:
        raise ConfigError(f"[problem] missing required key {key!r}")
    return default


def build_problem(cfg):
    """Resolve the [problem] section into a ProblemInstance."""
    from irig.harness import generators as gen
    from irig.harness.datasets import LabeledDataset, load_svmlight, partition_batches
    from irig.harness.fstar import estimate_f_star

    P = cfg.problem
    kind = P["kind"].strip()
    vec = lambda s, k: tuple(_vector(s, k))  # noqa: E731
    text = lambda s, k: s.strip()  # noqa: E731
    try:
        if kind == "selection":
            dim = _get(P, "dim", _int, 2)
            spec = gen.SelectionSpec(
                dim=dim,
                multiplicities=tuple(int(v) for v in _get(P, "multiplicities", vec, (2, 0) if dim == 2 else None)),
                half_width=_get(P, "half_width", _float, 2.0),
                upper=_get(P, "upper", text, "quadratic"),
                center=tuple(_vector(P["center"], "center")) if "center" in P else None,
                mu=_get(P, "mu", _float, 1.0),
            )
            return gen.gen_selection_problem(spec)
        if kind == "constrained":
            cons = parse_constraints(_get(P, "constraints", text))
            n = len(cons[0][0])
            spec = gen.ConstrainedSpec(
                constraints=cons,
                lower=_get(P, "lower", vec, (-2.0,) * n),
                upper_bounds=_get(P, "upper_bounds", vec, (2.0,) * n),
                upper=_get(P, "upper", text, "quadratic"),
                center=_get(P, "center", vec, (0.0,) * n),
                mu=_get(P, "mu", _float, 1.0),
            )
            return gen.gen_constrained_problem(spec)
        if kind in ("classification", "svmlight"):
            m = _get(P, "m", _int)
            if kind == "classification":
                A, labels = gen.synthetic_classification(
                    n=_get(P, "n", _int, 200),
                    n_samples=_get(P, "samples", _int, 2000),
                    nnz=_get(P, "nnz", _int, 10),
                    noise=_get(P, "noise", _float, 0.05),
                    seed=cfg.seed,
                )
                data = LabeledDataset(A, labels)
            else:
                data = load_svmlight(_get(P, "path", text), P.get("dim") and _int(P["dim"], "dim"))
            n = data.dim
            prob = ProblemInstance(
                partition_batches(data, m),
                ElasticNet(_get(P, "mu", _float, 0.1), n),
                Box.cube(n, _get(P, "half_width", _float, 1e3)),
            )
            if "f_star" in P:
                prob.known_f_star = _float(P["f_star"], "f_star")
            elif _get(P, "estimate_f_star", lambda s, k: _bool(s), True):
                method = P.get("f_star_method", "auto").strip()
                lam = _get(P, "f_star_lambda", _float, 1e-4)
                iters = _get(P, "f_star_iters", _int, 1_000_000)
                log.info("estimating f* (method=%s)", method)
                prob.known_f_star = estimate_f_star(prob, method, lam, iters, cfg.backend)
                prob.f_star_estimated = True
            return prob
    except ConfigError:
        raise
    except (ValueError, OSError) as exc:
        raise ConfigError(f"[problem] {exc}") from exc
    raise ConfigError(f"unknown problem kind {kind!r}")


def with_overrides(cfg, **kw):
    return replace(cfg, **kw)

"""Command-line entry point: ``irig <subcommand> ...``.

Exit codes: 0 success, 1 usage or configuration error, 2 validation
failure (inadmissible schedule, infeasible generated problem), 3 runtime
failure.
"""

import argparse
import csv
from concurrent.futures import ProcessPoolExecutor
import logging
import os
import sys

import numpy as np

from irig.harness.config import (
    BenchGrid,
    ConfigError,
    build_problem,
    build_schedule,
    build_x0,
    checkpoints_for,
    load_config,
    parse_config,
    with_overrides,
)
from irig.harness.generators import InfeasibleProblemError
from irig.harness.metrics import emit_metrics_csv, format_trace, read_metrics_csv, fit_rate
from irig.schedules import validate
from irig.solver import InvalidScheduleError, run_irig, solve_regularized_reference

log = logging.getLogger("irig")

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt_vec(x, limit=8):
    x = np.asarray(x)
    body = " ".join("%.10g" % v for v in x[:limit])
    return body + (" ..." if x.size > limit else "")


def _load(args):
    cfg = load_config(args.config)
    kw = {}
    for name in ("iterations", "backend", "csv"):
        val = getattr(args, name, None)
        if val is not None:
            kw[name] = val
    if getattr(args, "override", False):
        kw["override"] = True
    if getattr(args, "no_wall_clock", False):
        kw["wall_clock"] = False
    return with_overrides(cfg, **kw) if kw else cfg


def cmd_solve(args):
    cfg = _load(args)
    p = build_problem(cfg)
    s = build_schedule(cfg, p.m, p.mu_h)
    x0 = build_x0(cfg, p.dim)
    xbar, trace = run_irig(p, s, cfg.iterations, x0, record_at=checkpoints_for(cfg),
                           override=cfg.override, backend=cfg.backend,
                           wall_clock=cfg.wall_clock)
    if cfg.csv:
        emit_metrics_csv(trace, cfg.csv)
    else:
        sys.stdout.write(format_trace(trace))
    last = trace.rows[-1]
    print(f"backend={trace.meta['backend']} N={cfg.iterations} f(x_bar)={last.f_bar:.10g} "
          f"h(x_bar)={last.h_bar:.10g}", file=sys.stderr)
    print(f"x_bar = {_fmt_vec(xbar)}", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args):
    cfg = _load(args)
    p = build_problem(cfg)
    s = build_schedule(cfg, p.m, p.mu_h)
    report = validate(s, p.m, p.mu_h)
    print(f"m={p.m} mu_h={p.mu_h:g} gamma0={s.gamma0:g} lambda0={s.lambda0:g} "
          f"a={s.a:g} b={s.b:g} r={s.r:g}")
    print(report.format())
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_reference(args):
    cfg = _load(args)
    p = build_problem(cfg)
    x = solve_regularized_reference(p, args.lam, args.iters, step_c=args.step_c,
                                    backend=cfg.backend)
    if args.out:
        np.savetxt(args.out, x, fmt="%.17g")
    print(f"lambda={args.lam:g} iters={args.iters} f={p.f(x):.17g} h={p.h(x):.17g}")
    print(f"x_ref = {_fmt_vec(x)}")
    return EXIT_OK


def cmd_rate_fit(args):
    try:
        trace = read_metrics_csv(args.csv)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.csv}: {exc}") from None
    slope, intercept = fit_rate(trace, args.burn_in, strict=not args.skip_nonpositive)
    est = " (f* estimated)" if trace.meta.get("f_star_estimated") else ""
    print(f"slope={slope:.6f} intercept={intercept:.6f}{est}")
    return EXIT_OK


def _parse_assignments(items):
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"expected key=value, got {item!r}")
        out[key.strip()] = val.strip()
    return out


def cmd_gen(args):
    from irig.harness.datasets import LabeledDataset, write_svmlight
    from irig.harness import generators as gen

    params = {"kind": args.kind, **_parse_assignments(args.params)}
    seed = params.pop("seed", "0")
    lines = ["[problem]"] + [f"{k} = {v}" for k, v in params.items()]
    lines += ["", "[run]", f"seed = {seed}"]
    text = "\n".join(lines) + "\n"
    cfg = parse_config(text)
    if args.kind == "classification":
        if "m" not in params:
            cfg.problem["m"] = "1"
        P = cfg.problem
        A, labels = gen.synthetic_classification(
            n=int(P.get("n", 200)), n_samples=int(P.get("samples", 2000)),
            nnz=int(P.get("nnz", 10)), noise=float(P.get("noise", 0.05)), seed=cfg.seed)
        write_svmlight(args.out, LabeledDataset(A, labels))
        print(f"wrote {A.shape[0]} samples of dimension {A.shape[1]} to {args.out}")
        return EXIT_OK
    if args.kind not in ("selection", "constrained"):
        raise ConfigError("gen supports selection, constrained and classification")
    p = build_problem(cfg)  # validates the spec, runs the feasibility probe
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    xh = "unknown" if p.known_x_h_star is None else _fmt_vec(p.known_x_h_star)
    print(f"wrote {args.kind} problem (m={p.m}, n={p.dim}, x_h*={xh}) to {args.out}")
    return EXIT_OK


def _cell_name(x0, g0, l0, r):
    return f"x0={x0:g}_g0={g0:g}_l0={l0:g}_r={r:g}.csv"


def _bench_cell(config_text, overrides, x0, g0, l0, r, out_dir):
    """Run one grid cell; returns a summary dict.  Executes in a worker."""
    cfg = with_overrides(parse_config(config_text), **overrides)
    cfg = with_overrides(cfg, x0=f"const:{x0!r}", gamma0=g0, lambda0=l0, r=r, override=True)
    p = build_problem(cfg)
    s = build_schedule(cfg, p.m, p.mu_h)
    report = validate(s, p.m, p.mu_h)
    path = os.path.join(out_dir, _cell_name(x0, g0, l0, r))
    row = {"x0": x0, "gamma0": g0, "lambda0": l0, "r": r, "valid": report.ok,
           "csv": os.path.basename(path), "status": "ok", "final_f_bar": "", "final_f_gap": ""}
    try:
        _, trace = run_irig(p, s, cfg.iterations, build_x0(cfg, p.dim),
                            record_at=checkpoints_for(cfg), override=True,
                            backend=cfg.backend, wall_clock=cfg.wall_clock)
    except (FloatingPointError, ValueError) as exc:
        row["status"] = f"failed: {exc}"
        return row
    emit_metrics_csv(trace, path)
    last = trace.rows[-1]
    row["final_f_bar"] = "%.17g" % last.f_bar
    if last.f_gap is not None:
        row["final_f_gap"] = "%.17g" % last.f_gap
    return row


def cmd_bench(args):
    cfg = _load(args)
    grid = cfg.bench or BenchGrid()
    out_dir = args.out_dir or grid.out_dir
    workers = args.workers or grid.workers
    os.makedirs(out_dir, exist_ok=True)
    with open(args.config, encoding="utf-8") as fh:
        text = fh.read()
    overrides = {k: getattr(cfg, k) for k in ("iterations", "backend", "wall_clock")}
    build_problem(cfg)  # fail fast on a bad problem before spawning workers
    cells = [(x0, g0, l0, r) for x0 in grid.x0 for (g0, l0) in grid.steps for r in grid.r]
    jobs = [(text, overrides, *c, out_dir) for c in cells]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_bench_cell, *zip(*jobs)))
    else:
        rows = [_bench_cell(*j) for j in jobs]
    summary = os.path.join(out_dir, "summary.csv")
    with open(summary, "w", encoding="ascii", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    failed = [r for r in rows if r["status"] != "ok"]
    print(f"{len(rows)} cells, {len(failed)} failed; summary in {summary}")
    return EXIT_RUNTIME if failed else EXIT_OK


def build_parser():
    ap = _Parser(prog="irig", description="IR-IG bilevel solver")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_config(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config", help="run configuration (INI)")
        sp.add_argument("--backend", choices=["auto", "compiled", "python"])
        return sp

    sp = with_config("solve", "run IR-IG from a config")
    sp.add_argument("--iterations", type=int)
    sp.add_argument("--csv", help="metrics CSV path (default: stdout)")
    sp.add_argument("--override", action="store_true", help="run even with an inadmissible schedule")
    sp.add_argument("--no-wall-clock", action="store_true", help="leave elapsed_s empty")
    sp.set_defaults(func=cmd_solve)

    sp = with_config("validate", "check the schedule conditions")
    sp.set_defaults(func=cmd_validate)

    sp = with_config("reference", "approximate the minimizer of f + lam*h")
    sp.add_argument("--lam", type=float, default=1e-3)
    sp.add_argument("--iters", type=int, default=100000)
    sp.add_argument("--step-c", type=float, default=1.0)
    sp.add_argument("--out", help="write the point, one coordinate per line")
    sp.set_defaults(func=cmd_reference)

    sp = sub.add_parser("rate-fit", help="fit the empirical rate exponent from a metrics CSV")
    sp.add_argument("csv")
    sp.add_argument("--burn-in", type=float, default=0.2)
    sp.add_argument("--skip-nonpositive", action="store_true",
                    help="skip rows with f_gap <= 0 instead of failing")
    sp.set_defaults(func=cmd_rate_fit)

    sp = sub.add_parser("gen", help="write a generated problem to disk")
    sp.add_argument("kind", choices=["selection", "constrained", "classification"])
    sp.add_argument("params", nargs="*", metavar="key=value",
                    help="[problem] keys, plus seed for classification")
    sp.add_argument("-o", "--out", required=True)
    sp.set_defaults(func=cmd_gen)

    sp = with_config("bench", "sweep x0, (gamma0, lambda0) and r over a grid")
    sp.add_argument("--iterations", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--out-dir")
    sp.add_argument("--no-wall-clock", action="store_true")
    sp.set_defaults(func=cmd_bench)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InvalidScheduleError as exc:
        print(f"irig: invalid schedule: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InfeasibleProblemError as exc:
        print(f"irig: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConfigError as exc:
        if isinstance(exc.__cause__, InfeasibleProblemError):
            print(f"irig: {exc.__cause__}", file=sys.stderr)
            return EXIT_INVALID
        print(f"irig: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, ArithmeticError, RuntimeError) as exc:
        print(f"irig: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

"""Compare the compiled and pure-Python IR-IG backends.

Run from the repository root::

    python3 benchmarks/bench_backends.py [--p2-iters 100000] [--clf-iters 500]

Both backends execute the same floating-point operations in the same
order, so besides timing this script checks that the averaged iterates
agree bit for bit.
"""

import argparse
import time

import numpy as np

from irig import ElasticNet, ProblemInstance, Box, rate_schedule, run_irig
from irig._kernels import HAVE_COMPILED
from irig.harness.datasets import LabeledDataset, partition_batches
from irig.harness.generators import p2, synthetic_classification


def classification(m=20):
    A, labels = synthetic_classification(n=200, n_samples=2000, nnz=10, seed=0)
    comps = partition_batches(LabeledDataset(A, labels), m)
    return ProblemInstance(comps, ElasticNet(0.1, 200), Box.cube(200, 1e3))


def time_backend(problem, schedule, n_iter, x0, backend, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        xbar, _ = run_irig(problem, schedule, n_iter, x0, record_at=[0, n_iter],
                           backend=backend, wall_clock=False)
        best = min(best, time.perf_counter() - t0)
    return best, xbar


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p2-iters", type=int, default=100_000)
    ap.add_argument("--clf-iters", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if not HAVE_COMPILED:
        raise SystemExit("compiled extension unavailable; build with `pip install -e .`")

    cases = [
        ("P2 (m=2, n=2)", p2(), rate_schedule(0.1, 1.0, 1.0), args.p2_iters, np.array([2.0, -2.0])),
        ("hinge (m=20, n=200)", classification(), rate_schedule(0.1, 0.1, 1.0),
         args.clf_iters, np.zeros(200)),
    ]
    print(f"{'problem':<22}{'N':>9}{'compiled s':>13}{'python s':>12}{'speedup':>10}  identical")
    for name, prob, sched, n, x0 in cases:
        tc, xc = time_backend(prob, sched, n, x0, "compiled", args.repeat)
        tp, xp = time_backend(prob, sched, n, x0, "python", 1)
        same = np.array_equal(xc, xp)
        print(f"{name:<22}{n:>9}{tc:>13.4f}{tp:>12.4f}{tp / tc:>10.1f}  {same}")


if __name__ == "__main__":
    main()

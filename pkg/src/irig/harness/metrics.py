"""Metrics CSV serialization and empirical rate fitting."""

import logging
import math

import numpy as np

from irig.solver import Trace, TraceRow

log = logging.getLogger(__name__)

__all__ = ["HEADER", "emit_metrics_csv", "format_trace", "parse_metrics_csv",
           "read_metrics_csv", "fit_rate", "fit_power_law"]

HEADER = "k,f_bar,f_gap,h_bar,dist_xstar,gamma_k,lambda_k,elapsed_s"
_FIELDS = HEADER.split(",")


def _fmt(v):
    if v is None:
        return ""
    v = float(v)
    if not math.isfinite(v):
        raise ValueError(f"refusing to write non-finite metric {v!r}")
    return "%.17g" % v


def format_trace(trace):
    """Render a trace as CSV text (17 significant digits, ``\\n`` endings)."""
    if not trace.rows:
        raise ValueError("trace is empty")
    lines = []
    f_star = trace.meta.get("f_star")
    if f_star is not None:
        tag = " (estimated; f_gap is estimated)" if trace.meta.get("f_star_estimated") else ""
        lines.append(f"# f_star: {_fmt(f_star)}{tag}")
    lines.append(HEADER)
    for row in trace.rows:
        lines.append(",".join([str(int(row.k))] + [_fmt(v) for v in row[1:]]))
    return "\n".join(lines) + "\n"


def emit_metrics_csv(trace, path):
    text = format_trace(trace)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)
    return path


def parse_metrics_csv(text):
    meta = {}
    rows = []
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("f_star:"):
                val = body[len("f_star:"):].strip().split()[0]
                meta["f_star"] = float(val)
                meta["f_star_estimated"] = "estimated" in body
            continue
        if not header_seen:
            if line.strip() != HEADER:
                raise ValueError(f"line {lineno}: unexpected header {line!r}")
            header_seen = True
            continue
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(_FIELDS):
            raise ValueError(f"line {lineno}: expected {len(_FIELDS)} fields, got {len(parts)}")
        vals = [int(parts[0])] + [float(p) if p != "" else None for p in parts[1:]]
        rows.append(TraceRow(*vals))
    if not header_seen:
        raise ValueError("missing CSV header")
    return Trace(rows=rows, meta=meta)


def read_metrics_csv(path):
    with open(path, encoding="ascii") as fh:
        return parse_metrics_csv(fh.read())


def fit_power_law(k, gap):
    """Least-squares line through ``(log k, log gap)``; returns (slope, intercept)."""
    lk = np.log(np.asarray(k, dtype=float))
    lg = np.log(np.asarray(gap, dtype=float))
    A = np.column_stack([lk, np.ones_like(lk)])
    (slope, intercept), *_ = np.linalg.lstsq(A, lg, rcond=None)
    return float(slope), float(intercept)


def fit_rate(trace, burn_in_fraction=0.2, strict=True):
    """Fit ``log f_gap ~ slope * log k + intercept`` after a burn-in.

    The first ``floor(burn_in_fraction * len(rows))`` rows are discarded;
    rows with ``k = 0`` or no gap are ignored.  Non-positive gaps raise
    ``ValueError`` when `strict`, otherwise they are skipped and counted in
    a warning.
    """
    if not 0.0 <= burn_in_fraction < 1.0:
        raise ValueError("burn_in_fraction must lie in [0, 1)")
    rows = trace.rows if isinstance(trace, Trace) else list(trace)
    rows = rows[int(math.floor(burn_in_fraction * len(rows))):]
    rows = [r for r in rows if r.k > 0 and r.f_gap is not None]
    bad = sum(1 for r in rows if not r.f_gap > 0)
    if bad:
        if strict:
            raise ValueError(f"{bad} rows have non-positive f_gap after burn-in")
        log.warning("skipping %d rows with non-positive f_gap", bad)
    rows = [r for r in rows if r.f_gap > 0]
    if len(rows) < 2:
        raise ValueError(f"need at least 2 usable rows after burn-in, have {len(rows)}")
    return fit_power_law([r.k for r in rows], [r.f_gap for r in rows])

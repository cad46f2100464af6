"""Explicit right-hand sides of the IR-IG error bounds, for checking runs."""

import numpy as np

__all__ = ["f_gap_bound", "drift_bound", "recursive_bound"]


def f_gap_bound(schedule, n_iter, m, constants):
    """Upper bound on ``f(x_bar_N) - f*`` after `n_iter` outer iterations.

    ``(sum gamma_k^r)^-1 * ( m sum gamma_k^{r+1} (C_f^2 + lambda_k^2 C_h^2)
    + m^2 C_f sum gamma_k^{r+1} (C_f + lambda_k C_h)
    + 2 M_h sum gamma_k^r lambda_k + 2 M^2 gamma_{N-1}^{r-1} )``,
    sums over ``k = 0..N-1``.
    """
    if n_iter < 1:
        raise ValueError("n_iter must be at least 1")
    c = constants
    r = schedule.r
    g = schedule.gammas(n_iter)
    lam = schedule.lambdas(n_iter)
    gr = g**r
    gr1 = g ** (r + 1.0)
    total = (
        m * np.sum(gr1 * (c.C_f**2 + lam**2 * c.C_h**2))
        + m**2 * c.C_f * np.sum(gr1 * (c.C_f + lam * c.C_h))
        + 2.0 * c.M_h * np.sum(gr * lam)
        + 2.0 * c.M**2 * g[-1] ** (r - 1.0)
    )
    return float(total / np.sum(gr))


def drift_bound(lam_prev, lam_curr, C_h, mu_h):
    """Bound on ``||x*_{lam_curr} - x*_{lam_prev}||``."""
    return C_h / mu_h * abs(1.0 - lam_prev / lam_curr)


def recursive_bound(prev_err_sq, gamma_k, lam_k, lam_prev, m, mu_h, constants):
    """Right-hand side bounding ``||x_{k+1} - x*_{lam_k}||^2`` given
    ``prev_err_sq = ||x_k - x*_{lam_{k-1}}||^2``.

    Requires ``0 < gamma_k lam_k mu_h <= 2m``.
    """
    c = constants
    q = gamma_k * lam_k * mu_h
    if not 0 < q <= 2 * m:
        raise ValueError("need 0 < gamma_k*lambda_k*mu_h <= 2m")
    return (
        (1.0 - q / (2 * m)) * prev_err_sq
        + 3 * m * c.C_h**2 / (q * mu_h**2) * (1.0 - lam_prev / lam_k) ** 2
        + 6 * m**2 * gamma_k**2 * (c.C_f**2 + lam_k**2 * c.C_h**2)
    )

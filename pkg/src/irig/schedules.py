"""Power-law step-size and regularization schedules.

``gamma_k = gamma0 / (k+1)**a`` and ``lambda_k = lambda0 / (k+1)**b``, with
averaging weights proportional to ``gamma_t**r``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

__all__ = [
    "PowerSchedule",
    "ValidationReport",
    "validate",
    "rate_schedule",
    "closed_form_weights",
    "weights_from_steps",
    "default_schedule",
    "CHECKS",
]

# names of the admissibility checks, in report order
CHECKS = (
    "gamma0*lambda0 <= 2m/mu_h",
    "a > b",
    "a > 0.5",
    "a + b < 1",
    "a*r <= 1",
    "r < 1",
)

# relative slack on the product bound so that gamma0*lambda0 == 2m/mu_h
# survives rounding
_PRODUCT_RTOL = 1e-12


@dataclass(frozen=True)
class PowerSchedule:
    """Step-size / regularization schedule parameters.

    ``r`` is not restricted here; whether it is admissible (``r < 1``) is
    reported by :func:`validate`.
    """

    gamma0: float
    lambda0: float
    a: float
    b: float
    r: float = 0.5

    def __post_init__(self):
        for name in ("gamma0", "lambda0", "a", "b"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        if not math.isfinite(self.r):
            raise ValueError("r must be finite")

    def gamma_at(self, k):
        if k < 0:
            raise ValueError("k must be non-negative")
        return self.gamma0 / (k + 1) ** self.a

    def lambda_at(self, k):
        if k < 0:
            raise ValueError("k must be non-negative")
        return self.lambda0 / (k + 1) ** self.b

    def weight_at(self, k):
        """Averaging weight ``gamma_k**r``."""
        return self.gamma_at(k) ** self.r

    def gammas(self, k_stop):
        k = np.arange(k_stop, dtype=np.float64)
        return self.gamma0 / (k + 1.0) ** self.a

    def lambdas(self, k_stop):
        k = np.arange(k_stop, dtype=np.float64)
        return self.lambda0 / (k + 1.0) ** self.b


def gamma_at(s, k):
    return s.gamma_at(k)


def lambda_at(s, k):
    return s.lambda_at(k)


@dataclass
class ValidationReport:
    """Outcome of :func:`validate`; violations are data, not errors."""

    checks: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.checks.values())

    @property
    def violations(self):
        return [name for name, passed in self.checks.items() if not passed]

    def __bool__(self):
        return self.ok

    def format(self):
        lines = [f"{'PASS' if v else 'FAIL'}  {k}" for k, v in self.checks.items()]
        lines.append("ok" if self.ok else "violations: " + "; ".join(self.violations))
        return "\n".join(lines)


def validate(s, m, mu_h):
    """Check a schedule against the convergence hypotheses of IR-IG.

    Each condition is evaluated independently:
    ``gamma0*lambda0 <= 2m/mu_h``, ``a > b``, ``a > 0.5``, ``a + b < 1``,
    ``a*r <= 1`` and ``r < 1``.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if not mu_h > 0:
        raise ValueError("mu_h must be positive")
    bound = 2.0 * m / mu_h
    results = (
        s.gamma0 * s.lambda0 <= bound * (1.0 + _PRODUCT_RTOL),
        s.a > s.b,
        s.a > 0.5,
        s.a + s.b < 1.0,
        s.a * s.r <= 1.0,
        s.r < 1.0,
    )
    return ValidationReport(dict(zip(CHECKS, results)))


def rate_schedule(epsilon, gamma0, lambda0, r=0.5):
    """Schedule with ``a = 0.5 + 0.5*epsilon``, ``b = 0.5 - epsilon``.

    Gives an ``O(1/N**(0.5 - epsilon))`` rate for the lower-level gap.
    """
    if not 0.0 < epsilon < 0.5:
        raise ValueError(f"epsilon must lie in (0, 0.5), got {epsilon!r}")
    return PowerSchedule(gamma0, lambda0, 0.5 + 0.5 * epsilon, 0.5 - epsilon, r)


def default_schedule(m, mu_h, epsilon=0.1, r=0.5):
    """``rate_schedule`` with gamma0 = 1 and lambda0 = min(1, 2m/mu_h)."""
    return rate_schedule(epsilon, 1.0, min(1.0, 2.0 * m / mu_h), r)


def weights_from_steps(gammas, r):
    """Normalized weights ``gamma_t**r / sum_i gamma_i**r``."""
    g = np.asarray(gammas, dtype=np.float64)
    if g.ndim != 1 or g.size == 0 or np.any(g <= 0):
        raise ValueError("step sizes must be a nonempty positive sequence")
    w = g**r
    return w / w.sum()


def closed_form_weights(s, k):
    """Weights ``psi_{t,k}`` for ``t = 0..k`` of the averaged iterate."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return weights_from_steps(s.gammas(k + 1), s.r)

"""Compact convex feasible sets with Euclidean projection."""

import itertools
import math

import numpy as np

from irig.numerics import as_dense, seq_sum

__all__ = ["FeasibleSet", "Box", "Ball2", "project", "contains", "radius_bound"]

_SHRINK = 1.0 - 4.0 * np.finfo(float).eps


class FeasibleSet:
    """Base class for the sets ``X`` the solver projects onto."""

    dim: int

    def project(self, x):
        raise NotImplementedError

    def contains(self, x, tol=0.0):
        raise NotImplementedError

    def radius_bound(self):
        raise NotImplementedError

    def sample(self, count, rng):
        """Draw `count` points of the set, one row per point.

        Draws are sequential per point, so a larger `count` with the same
        generator state yields a superset of the smaller sample.
        """
        raise NotImplementedError

    def extreme_points(self):
        """A small set of boundary points worth probing (may be empty)."""
        return np.empty((0, self.dim))


class Box(FeasibleSet):
    """Axis-aligned box ``{x : lower <= x <= upper}``."""

    def __init__(self, lower, upper):
        lower = as_dense(lower, name="lower")
        upper = as_dense(upper, lower.shape[0], name="upper")
        if np.any(lower > upper):
            raise ValueError("box is empty: some lower bound exceeds its upper bound")
        self.lower = lower
        self.upper = upper
        self.dim = lower.shape[0]

    @classmethod
    def cube(cls, dim, half_width, center=0.0):
        c = np.broadcast_to(np.asarray(center, dtype=float), (dim,))
        return cls(c - half_width, c + half_width)

    def project(self, x):
        x = np.asarray(x, dtype=np.float64)
        _check_dim(self, x)
        return np.minimum(np.maximum(x, self.lower), self.upper)

    def contains(self, x, tol=0.0):
        if tol < 0:
            raise ValueError("tol must be non-negative")
        x = np.asarray(x, dtype=np.float64)
        _check_dim(self, x)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def radius_bound(self):
        return math.sqrt(seq_sum(np.maximum(self.lower**2, self.upper**2)))

    def sample(self, count, rng):
        out = np.empty((count, self.dim))
        for i in range(count):
            out[i] = rng.uniform(self.lower, self.upper)
        return out

    def extreme_points(self, max_dim=12):
        if self.dim > max_dim:
            # the max-norm corner is still cheap to find
            return np.where(self.upper**2 >= self.lower**2, self.upper, self.lower)[None, :]
        pairs = zip(self.lower, self.upper)
        return np.array(list(itertools.product(*pairs)), dtype=float).reshape(-1, self.dim)

    def __repr__(self):
        return f"Box(lower={self.lower.tolist()}, upper={self.upper.tolist()})"


class Ball2(FeasibleSet):
    """Euclidean ball ``{x : ||x - center|| <= radius}``."""

    def __init__(self, center, radius):
        self.center = as_dense(center, name="center")
        self.radius = float(radius)
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError("radius must be positive and finite")
        self.dim = self.center.shape[0]

    def project(self, x):
        x = np.asarray(x, dtype=np.float64)
        _check_dim(self, x)
        d = x - self.center
        nd = math.sqrt(seq_sum(d * d))
        if nd <= self.radius:
            return x.copy()
        scale = self.radius / nd
        while True:
            y = self.center + scale * d
            e = y - self.center
            if math.sqrt(seq_sum(e * e)) <= self.radius:
                return y
            # rounding put us a hair outside; shrink until membership is exact
            scale *= _SHRINK

    def contains(self, x, tol=0.0):
        if tol < 0:
            raise ValueError("tol must be non-negative")
        x = np.asarray(x, dtype=np.float64)
        _check_dim(self, x)
        d = x - self.center
        return math.sqrt(seq_sum(d * d)) <= self.radius + tol

    def radius_bound(self):
        return math.sqrt(seq_sum(self.center**2)) + self.radius

    def sample(self, count, rng):
        out = np.empty((count, self.dim))
        for i in range(count):
            u = rng.standard_normal(self.dim)
            nu = np.linalg.norm(u)
            rho = self.radius * rng.random() ** (1.0 / self.dim)
            out[i] = self.center + (rho / nu) * u if nu > 0 else self.center
        return out

    def extreme_points(self):
        eye = np.eye(self.dim) * self.radius
        pts = [self.center + eye, self.center - eye]
        nc = np.linalg.norm(self.center)
        if nc > 0:
            pts.append((self.center + self.radius * self.center / nc)[None, :])
        return np.vstack([self.project(p) for p in np.vstack(pts)])

    def __repr__(self):
        return f"Ball2(center={self.center.tolist()}, radius={self.radius})"


def _check_dim(s, x):
    if x.ndim != 1 or x.shape[0] != s.dim:
        raise ValueError(f"dimension mismatch: set has {s.dim}, vector has shape {x.shape}")


def project(s, x):
    """Euclidean projection of `x` onto `s`."""
    return s.project(x)


def contains(s, x, tol=0.0):
    return s.contains(x, tol)


def radius_bound(s):
    """Upper bound on ``||x||`` over the set, tight for boxes and balls."""
    return s.radius_bound()

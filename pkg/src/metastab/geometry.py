"""Finite-dimensional Hilbert-space arithmetic and compact convex ambient sets.

Points are 1-d float64 arrays.  The ambient sets are axis-aligned boxes and
Euclidean balls: both have closed-form metric projections, an integer bound on
their diameter, and a grid-counting modulus of total boundedness gamma with
the pigeonhole guarantee that among any gamma(k)+1 points of the set two are
within 1/(k+1) of each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ContractViolation(ValueError):
    """A documented precondition was violated by the caller."""


def point(*coords) -> np.ndarray:
    """Build a point from scalar coordinates, validating finiteness."""
    p = np.asarray(coords if len(coords) != 1 else coords[0], dtype=float)
    if p.ndim == 0:
        p = p.reshape(1)
    if p.ndim != 1 or p.size < 1:
        raise ContractViolation(f"a point must be a 1-d vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ContractViolation("point coordinates must be finite")
    return p


def _check_same_dim(u: np.ndarray, v: np.ndarray):
    if u.shape != v.shape:
        raise ContractViolation(f"dimension mismatch: {u.shape} vs {v.shape}")


def inner(u: np.ndarray, v: np.ndarray) -> float:
    """Euclidean inner product <u, v>."""
    _check_same_dim(u, v)
    return float(np.dot(u, v))


def norm(u: np.ndarray) -> float:
    """Euclidean norm, sqrt(<u, u>)."""
    return float(np.linalg.norm(u))


def convex_combination(lam: float, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """lam*u + (1-lam)*v for lam in [0, 1]; lies on the segment [v, u]."""
    if not 0.0 <= lam <= 1.0:
        raise ContractViolation(f"combination weight must be in [0, 1], got {lam}")
    _check_same_dim(u, v)
    return lam * u + (1.0 - lam) * v


@dataclass(frozen=True)
class Box:
    """Axis-aligned box {x : lower <= x <= upper}, componentwise."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lower", point(self.lower))
        object.__setattr__(self, "upper", point(self.upper))
        _check_same_dim(self.lower, self.upper)
        if np.any(self.lower > self.upper):
            raise ContractViolation("box needs lower[i] <= upper[i] for every axis")

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def diameter_bound(self) -> int:
        """Integer ceiling of the exact Euclidean diameter ||upper - lower||."""
        return math.ceil(float(np.linalg.norm(self.upper - self.lower)) - 1e-12)

    def contains(self, x: np.ndarray, tol: float = 0.0) -> bool:
        _check_same_dim(x, self.lower)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def project(self, x: np.ndarray) -> np.ndarray:
        """Metric projection: componentwise clamp."""
        _check_same_dim(x, self.lower)
        return np.clip(x, self.lower, self.upper)

    def grid_cell_counts(self, k: int) -> list[int]:
        # cube cells of side 1/((k+1)*ceil(sqrt(d))) have diameter <= 1/(k+1)
        subdiv = (k + 1) * _ceil_sqrt_int(self.dim)
        sides = self.upper - self.lower
        return [max(1, math.ceil(float(s) * subdiv - 1e-12)) for s in sides]

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lower, self.upper, size=(n, self.dim))

    def describe(self) -> dict:
        return {"kind": "box", "lower": self.lower.tolist(), "upper": self.upper.tolist()}


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball {x : ||x - center|| <= radius}."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", point(self.center))
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ContractViolation(f"ball radius must be positive and finite, got {self.radius}")

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def diameter_bound(self) -> int:
        return math.ceil(2.0 * self.radius - 1e-12)

    def contains(self, x: np.ndarray, tol: float = 0.0) -> bool:
        _check_same_dim(x, self.center)
        return float(np.linalg.norm(x - self.center)) <= self.radius + tol

    def project(self, x: np.ndarray) -> np.ndarray:
        """Metric projection: radial scaling toward the center."""
        _check_same_dim(x, self.center)
        d = float(np.linalg.norm(x - self.center))
        if d <= self.radius:
            return x
        return self.center + (x - self.center) * (self.radius / d)

    def grid_cell_counts(self, k: int) -> list[int]:
        # covering count of the enclosing box of side 2*radius
        enclosing = Box(self.center - self.radius, self.center + self.radius)
        return enclosing.grid_cell_counts(k)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        v = rng.normal(size=(n, self.dim))
        v /= np.maximum(np.linalg.norm(v, axis=1, keepdims=True), 1e-300)
        r = self.radius * rng.uniform(0.0, 1.0, size=(n, 1)) ** (1.0 / self.dim)
        return self.center + v * r

    def describe(self) -> dict:
        return {"kind": "ball", "center": self.center.tolist(), "radius": float(self.radius)}


AmbientSet = Box | Ball


def _ceil_sqrt_int(n: int) -> int:
    """Exact ceiling of sqrt(n) for a nonnegative integer n."""
    s = math.isqrt(n)
    return s if s * s == n else s + 1


def contains(ambient: AmbientSet, x: np.ndarray, tol: float = 0.0) -> bool:
    return ambient.contains(x, tol)


def project(ambient: AmbientSet, x: np.ndarray) -> np.ndarray:
    return ambient.project(x)


def total_boundedness_modulus(ambient: AmbientSet):
    """Grid-counting modulus of total boundedness.

    Returns gamma with gamma(k) = product over axes of the number of cube
    cells of side 1/((k+1)*ceil(sqrt(d))) needed to cover the set.  Each cell
    has diameter <= 1/(k+1), so by pigeonhole any gamma(k)+1 points of the
    set contain a pair at distance <= 1/(k+1).
    """

    def gamma(k: int) -> int:
        if k < 0:
            raise ContractViolation("the precision index k must be a natural number")
        return math.prod(ambient.grid_cell_counts(k))

    return gamma

"""Discretised probability space and weighted-sum quadrature."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _frozen(a, dtype=np.float64):
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Grid:
    """Sample points of [0, 1) with probability weights."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = _frozen(self.points)
        weights = _frozen(self.weights)
        if points.ndim != 1 or points.shape != weights.shape or points.size == 0:
            raise ValueError("points and weights must be non-empty 1-d arrays of equal length")
        if np.any(np.diff(points) <= 0):
            raise ValueError("grid points must be strictly increasing")
        if np.any(weights <= 0):
            raise ValueError("grid weights must be positive")
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"grid weights sum to {weights.sum()!r}, not 1")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.points.size

    def function(self, values) -> "SampledFunction":
        return SampledFunction(values, self)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values of a real function at every point of a grid."""

    values: np.ndarray
    grid: Grid

    def __post_init__(self):
        values = _frozen(self.values)
        if values.shape != (len(self.grid),):
            raise ValueError(f"expected {len(self.grid)} values, got shape {values.shape}")
        object.__setattr__(self, "values", values)

    def __add__(self, other):
        return SampledFunction(self.values + _values_on(other, self.grid), self.grid)

    def __sub__(self, other):
        return SampledFunction(self.values - _values_on(other, self.grid), self.grid)

    def __mul__(self, scalar):
        return SampledFunction(self.values * float(scalar), self.grid)

    __rmul__ = __mul__

    def __abs__(self):
        return SampledFunction(np.abs(self.values), self.grid)


def _values_on(f, grid):
    if isinstance(f, SampledFunction):
        if f.grid is not grid and len(f.grid) != len(grid):
            raise ValueError("functions live on different grids")
        return f.values
    return np.asarray(f, dtype=np.float64)


def make_uniform_grid(X: int) -> Grid:
    """Uniform grid {0, 1/X, ..., (X-1)/X} with weights 1/X."""
    if int(X) != X or X < 1:
        raise ValueError(f"grid size must be a positive integer, got {X!r}")
    X = int(X)
    return Grid(np.arange(X) / X, np.full(X, 1.0 / X))


def integrate(f: SampledFunction) -> float:
    return float(np.dot(f.grid.weights, f.values))


def lp_norm(f: SampledFunction, p: float) -> float:
    """Weighted L^p norm; ``p = inf`` gives the max of |f|."""
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p!r}")
    a = np.abs(f.values)
    top = a.max()
    if np.isinf(p):
        return float(top)
    if top == 0.0:
        return 0.0
    # scale by the max so large p cannot overflow
    return float(top * np.dot(f.grid.weights, (a / top) ** p) ** (1.0 / p))

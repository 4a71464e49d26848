"""Orthonormal systems on a grid, Haar rotations and the density reweighting."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, SampledFunction, make_uniform_grid
from .rng import stream


ORTHOGONALITY_TOL = 1e-10


class DegenerateDensityError(ValueError):
    """The density N^-1 sum_n phi_n(x)^2 vanishes at some grid point."""


def _readonly(a):
    arr = np.array(a, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SampledSystem:
    """N functions evaluated on a grid; row n of ``values`` is phi_n.

    ``bounded`` records that sum_n phi_n(x)^2 <= N holds at every point.
    """

    values: np.ndarray
    grid: Grid
    bounded: bool = False

    def __post_init__(self):
        values = _readonly(self.values)
        if values.ndim != 2 or values.shape[1] != len(self.grid):
            raise ValueError(f"values must have shape (N, {len(self.grid)}), got {values.shape}")
        object.__setattr__(self, "values", values)
        if self.bounded:
            n = values.shape[0]
            if np.any((values**2).sum(axis=0) > n * (1 + 1e-9)):
                raise ValueError("system flagged bounded but sum_n phi_n^2 exceeds N")

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def gram(self) -> np.ndarray:
        return (self.values * self.grid.weights) @ self.values.T

    def gram_error(self) -> float:
        return float(np.abs(self.gram() - np.eye(self.size)).max())

    def combination(self, coeffs) -> SampledFunction:
        """sum_n a_n phi_n as a sampled function."""
        a = _coeff_array(coeffs, self.size)
        return SampledFunction(a @ self.values, self.grid)


@dataclass(frozen=True, eq=False)
class OrthogonalMatrix:
    entries: np.ndarray

    def __post_init__(self):
        entries = _readonly(self.entries)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("orthogonal matrix must be square")
        object.__setattr__(self, "entries", entries)
        if self.orthogonality_error() > ORTHOGONALITY_TOL:
            raise ValueError(f"matrix is not orthogonal (|O^T O - I| = {self.orthogonality_error():.3g})")

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    @property
    def T(self) -> "OrthogonalMatrix":
        return OrthogonalMatrix(self.entries.T)

    def orthogonality_error(self) -> float:
        o = self.entries
        return float(np.abs(o.T @ o - np.eye(self.size)).max())

    @classmethod
    def identity(cls, n: int) -> "OrthogonalMatrix":
        return cls(np.eye(n))


@dataclass(frozen=True, eq=False)
class CoeffVector:
    entries: np.ndarray

    def __post_init__(self):
        entries = _readonly(self.entries)
        if entries.ndim != 1:
            raise ValueError("coefficients must be a 1-d array")
        object.__setattr__(self, "entries", entries)

    @property
    def support(self) -> int:
        return int(np.count_nonzero(self.entries))

    @property
    def size(self) -> int:
        return self.entries.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))


def _coeff_array(coeffs, n):
    a = coeffs.entries if isinstance(coeffs, CoeffVector) else np.asarray(coeffs, dtype=np.float64)
    if a.shape != (n,):
        raise ValueError(f"expected {n} coefficients, got shape {a.shape}")
    return a


def trig_system(N: int, grid: Grid) -> SampledSystem:
    """Real trigonometric system sqrt2 cos(2 pi j x), sqrt2 sin(2 pi j x), j = 1..N/2.

    Ordered (cos 1, sin 1, cos 2, sin 2, ...).
    """
    if N < 2 or N % 2:
        raise ValueError(f"trig system needs an even positive size, got {N}")
    if len(grid) < 2 * N + 2:
        raise ValueError(f"grid of {len(grid)} points too coarse for N={N} (need >= {2 * N + 2})")
    j = np.arange(1, N // 2 + 1)[:, None]
    angle = 2.0 * np.pi * j * grid.points[None, :]
    values = np.empty((N, len(grid)))
    values[0::2] = np.sqrt(2.0) * np.cos(angle)
    values[1::2] = np.sqrt(2.0) * np.sin(angle)
    return SampledSystem(values, grid, bounded=True)


def unit_vector_system(N: int) -> SampledSystem:
    """phi_n = sqrt(N) 1_{x_n} on the N-point uniform grid."""
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    return SampledSystem(np.sqrt(N) * np.eye(N), make_uniform_grid(N), bounded=True)


def haar_orthogonal(N: int, seed: int) -> OrthogonalMatrix:
    """Haar-distributed element of O(N).

    Gaussian fill, QR, then each column multiplied by the sign of the matching
    diagonal entry of R so that the factorisation is unique.
    """
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    rng = stream(seed, "haar", N)
    while True:
        z = rng.standard_normal((N, N))
        q, r = np.linalg.qr(z)
        d = np.diag(r)
        if np.abs(d).min() > N * np.finfo(float).eps * np.abs(d).max():
            return OrthogonalMatrix(q * np.sign(d))


def rotate_system(base: SampledSystem, O: OrthogonalMatrix) -> SampledSystem:
    """psi_n = sum_i o_{i,n} phi_i."""
    if O.size != base.size:
        raise ValueError(f"matrix of size {O.size} does not match system of size {base.size}")
    return SampledSystem(O.entries.T @ base.values, base.grid, bounded=base.bounded)


def truncate_system(base: SampledSystem, n: int) -> SampledSystem:
    """Keep the first ``n`` functions (still orthonormal, generally not flat)."""
    if not 1 <= n <= base.size:
        raise ValueError(f"cannot keep {n} of {base.size} functions")
    return SampledSystem(base.values[:n], base.grid)


def gaussian_sequence(N: int, seed: int) -> np.ndarray:
    """N iid standard normals, deterministic in ``seed``."""
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    return stream(seed, "gauss").standard_normal(N)


def reweight_system(base: SampledSystem) -> tuple[SampledSystem, SampledFunction]:
    """Divide by the root density nu = N^-1 sum phi_n^2.

    The returned system lives on the same points with weights w * nu, is
    orthonormal there and satisfies sum_n psi_n^2 = N.  The density is
    returned on the original grid.
    """
    nu = (base.values**2).mean(axis=0)
    if np.any(nu <= 0):
        raise DegenerateDensityError(
            f"degenerate density: nu vanishes at {int(np.count_nonzero(nu <= 0))} grid point(s)"
        )
    w = base.grid.weights * nu
    new_grid = Grid(base.grid.points, w / w.sum())
    return (
        SampledSystem(base.values / np.sqrt(nu), new_grid, bounded=True),
        SampledFunction(nu, base.grid),
    )

"""Maximal function and r-variation, exact over all interval partitions.

The O(N^2) dynamic program runs in the compiled ``_kernels`` extension
when it is importable, otherwise in the numpy fallback.  Set
``VARLAB_BACKEND=python`` to force the fallback.
"""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass

import numpy as np

from .grid import SampledFunction, lp_norm
from .systems import CoeffVector, SampledSystem, _coeff_array

if os.environ.get("VARLAB_BACKEND", "").lower() == "python":
    from . import _fallback as _core

    BACKEND = "python"
else:
    try:
        from . import _kernels as _core

        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _fallback as _core

        BACKEND = "python"

BRUTEFORCE_MAX_N = 20


def default_threads() -> int:
    env = os.environ.get("VARLAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _increments(d) -> np.ndarray:
    d = np.asarray(d, dtype=np.float64)
    if d.ndim != 1 or d.size == 0:
        raise ValueError("need a non-empty 1-d sequence")
    return d


def _check_r(r):
    if not r >= 1:
        raise ValueError(f"r must be >= 1, got {r!r}")
    return float(r)


def v_r_pointwise(d, r: float = 2.0) -> float:
    """(max over interval partitions of sum |block sum|^r)^(1/r)."""
    d = _increments(d)
    r = _check_r(r)
    prefix = np.concatenate(([0.0], np.cumsum(d)))
    return _core.vr_power_single(prefix, r) ** (1.0 / r)


def v_r_bruteforce(d, r: float = 2.0) -> float:
    """Same functional by enumerating all 2^(N-1) partitions (N <= 20)."""
    d = _increments(d)
    r = _check_r(r)
    n = d.size
    if n > BRUTEFORCE_MAX_N:
        raise ValueError(f"brute force limited to N <= {BRUTEFORCE_MAX_N}, got {n}")
    best = 0.0
    for cuts in itertools.product((False, True), repeat=n - 1):
        total, block = 0.0, d[0]
        for cut, x in zip(cuts, d[1:]):
            if cut:
                total += abs(block) ** r
                block = x
            else:
                block += x
        total += abs(block) ** r
        best = max(best, total)
    return float(best ** (1.0 / r))


def optimal_partition(d, r: float = 2.0) -> list[tuple[int, int]]:
    """An optimal partition as 1-based inclusive blocks.

    Ties go to the shortest last block: block starts are scanned from the
    right and only a strict improvement replaces the incumbent.
    """
    d = _increments(d)
    r = _check_r(r)
    n = d.size
    prefix = np.concatenate(([0.0], np.cumsum(d)))
    D = np.zeros(n + 1)
    arg = np.zeros(n + 1, dtype=int)
    for j in range(1, n + 1):
        cand = D[:j] + np.abs(prefix[j] - prefix[:j]) ** r
        best, best_i = -1.0, j - 1
        for i in range(j - 1, -1, -1):
            if cand[i] > best:
                best, best_i = cand[i], i
        D[j], arg[j] = best, best_i
    blocks, j = [], n
    while j > 0:
        blocks.append((int(arg[j]) + 1, j))
        j = int(arg[j])
    return blocks[::-1]


def maximal_pointwise(d) -> float:
    """max over l of |d_1 + ... + d_l|."""
    d = _increments(d)
    return float(np.abs(np.cumsum(d)).max())


@dataclass(frozen=True, eq=False)
class PrefixTable:
    """P[l] = sum_{n <= l} a_n phi_n on the grid, P[0] = 0; shape (N+1, X)."""

    P: np.ndarray
    system: SampledSystem

    @property
    def size(self) -> int:
        return self.P.shape[0] - 1

    def block(self, lo: int, hi: int) -> np.ndarray:
        """Values of sum_{lo <= n <= hi} a_n phi_n (1-based, inclusive)."""
        if hi < lo:
            return np.zeros(self.P.shape[1])
        return self.P[hi] - self.P[lo - 1]


def prefix_table(coeffs, system: SampledSystem) -> PrefixTable:
    a = _coeff_array(coeffs, system.size)
    P = np.zeros((system.size + 1, len(system.grid)))
    np.cumsum(a[:, None] * system.values, axis=0, out=P[1:])
    P.setflags(write=False)
    return PrefixTable(P, system)


@dataclass(frozen=True, eq=False)
class VariationResult:
    r: float
    pointwise: SampledFunction
    norm2: float


def v_r_field(coeffs, system: SampledSystem, r: float = 2.0, threads: int | None = None,
              prefix: PrefixTable | None = None) -> VariationResult:
    """V^r f at every grid point for f = sum a_n phi_n, and its L^2 norm."""
    r = _check_r(r)
    if prefix is None:
        prefix = prefix_table(coeffs, system)
    elif isinstance(coeffs, (CoeffVector, np.ndarray, list, tuple)):
        _coeff_array(coeffs, system.size)
    by_point = np.ascontiguousarray(prefix.P.T)
    power = _core.vr_power_field(by_point, r, threads or default_threads())
    field = SampledFunction(power ** (1.0 / r), system.grid)
    return VariationResult(r, field, lp_norm(field, 2))


def maximal_field(prefix: PrefixTable) -> SampledFunction:
    """Mf(x) = max_l |P[l](x)| on the grid."""
    return SampledFunction(np.abs(prefix.P[1:]).max(axis=0), prefix.system.grid)


def lil_statistic(g) -> float:
    """V^2(g)^2 / (2 N ln ln N); tends to 1 a.s. for iid standard Gaussians."""
    g = _increments(g)
    n = g.size
    if n < 16:
        raise ValueError(f"need N >= 16 so that ln ln N > 0, got {n}")
    return v_r_pointwise(g, 2.0) ** 2 / (2.0 * n * math.log(math.log(n)))

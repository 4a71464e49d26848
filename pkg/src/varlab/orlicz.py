"""Luxemburg norms for the Gaussian and truncated moduli, the bounded/tail split,
and the sub-Gaussian equivalence checks with explicit constants."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import SampledFunction, lp_norm

BISECTION_RTOL = 1e-9
BISECTION_MAX_ITER = 200


@dataclass(frozen=True)
class OrliczModulus:
    """Either ``gauss``: e^{c t^2} - 1, or ``truncated``: Gamma_K(t).

    Gamma_K(t) = e^{t^2} - 1 for |t| <= K and continues as the tangent-matched
    quadratic e^{K^2} t^2 + e^{K^2}(1 - K^2) - 1 beyond K.
    """

    kind: str
    param: float

    def __post_init__(self):
        if self.kind == "gauss":
            if not self.param > 0:
                raise ValueError(f"gauss modulus needs c > 0, got {self.param!r}")
        elif self.kind == "truncated":
            if not self.param >= 1:
                raise ValueError(f"truncated modulus needs K >= 1, got {self.param!r}")
        else:
            raise ValueError(f"unknown modulus kind {self.kind!r}")

    @classmethod
    def gauss(cls, c: float = 1.0) -> "OrliczModulus":
        return cls("gauss", float(c))

    @classmethod
    def truncated(cls, K: float) -> "OrliczModulus":
        return cls("truncated", float(K))

    @property
    def scale(self) -> float:
        # c in e^{c t^2}; the truncated modulus agrees with c = 1 near 0
        return self.param if self.kind == "gauss" else 1.0

    def __call__(self, t):
        return modulus_value(t, self)


def modulus_value(t, mod: OrliczModulus):
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(over="ignore"):
        if mod.kind == "gauss":
            out = np.expm1(mod.param * t * t)
        else:
            K = mod.param
            eK = math.exp(K * K)
            out = np.where(np.abs(t) <= K, np.expm1(t * t), eK * t * t + eK * (1.0 - K * K) - 1.0)
    return out if out.ndim else float(out)


def _functional(values, weights, mod, lam):
    with np.errstate(over="ignore"):
        return float(np.dot(weights, modulus_value(values / lam, mod)))


def luxemburg_norm(f: SampledFunction, mod: OrliczModulus) -> float:
    """inf{lam > 0 : sum_x w(x) Phi(f(x)/lam) <= 1} by bisection.

    The returned value is the feasible end of the final bracket, so it is
    never below the true norm and exceeds it by at most BISECTION_RTOL
    relative.  The bracket and the iteration count depend only on f and the
    scale c, so two moduli with Phi_1 <= Phi_2 give ordered results.
    """
    values = np.asarray(f.values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise ValueError("luxemburg_norm needs finite samples")
    weights = f.grid.weights
    top = float(np.abs(values).max())
    if top == 0.0:
        return 0.0
    c = mod.scale
    # homogeneous: work on f/top so subnormal or huge samples cannot underflow the bracket
    values = values / top
    # Phi(t) >= c t^2 gives the lower end; Phi(t) <= e^{c t^2} - 1 gives a feasible upper end
    lo = math.sqrt(c * float(weights @ (values * values)))
    hi = 2.0 * math.sqrt(c) / math.sqrt(math.log(2.0))
    n_iter = min(BISECTION_MAX_ITER, max(0, math.ceil(math.log2((hi - lo) / (BISECTION_RTOL * lo)))))
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        if _functional(values, weights, mod, mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi * top


def k_star(N: int, m: int) -> float:
    """Truncation level sqrt((2/5) ln((N/m) ln(N/m + 1))), clamped below at 1."""
    if not 1 <= m <= N:
        raise ValueError(f"need 1 <= m <= N, got m={m}, N={N}")
    ratio = N / m
    arg = 0.4 * math.log(ratio * math.log(ratio + 1.0))
    return max(1.0, math.sqrt(arg)) if arg > 0 else 1.0


@dataclass(frozen=True, eq=False)
class SplitPair:
    g_part: SampledFunction
    e_part: SampledFunction
    gamma: float
    K: float


def split_gamma_k(f: SampledFunction, K: float) -> SplitPair:
    """f = f1 + f2 with f1 = f on {|f| <= K gamma}, gamma = 2 ||f||_{Gamma_K}."""
    mod = OrliczModulus.truncated(K)
    gamma = 2.0 * luxemburg_norm(f, mod)
    values = f.values
    if gamma == 0.0:
        zero = SampledFunction(np.zeros_like(values), f.grid)
        return SplitPair(zero, zero, 0.0, float(K))
    inside = np.abs(values) <= K * gamma
    return SplitPair(
        SampledFunction(np.where(inside, values, 0.0), f.grid),
        SampledFunction(np.where(inside, 0.0, values), f.grid),
        gamma,
        float(K),
    )


def tail_bound_sq(gamma: float, K: float) -> float:
    """Explicit ceiling on ||f2||_2^2 read off the split construction."""
    eK = math.exp(K * K)
    return gamma * gamma / eK * (1.0 + (eK * (K * K - 1.0) + 1.0) / (eK - 1.0))


def split_slack(pair: SplitPair) -> tuple[float, float]:
    """Ratios (||f1||_G / gamma, ||f2||_2^2 / ceiling); both must be <= 1."""
    if pair.gamma == 0.0:
        return 0.0, 0.0
    g_ratio = luxemburg_norm(pair.g_part, OrliczModulus.gauss(1.0)) / pair.gamma
    # the ceiling is quadratic in gamma; divide first so tiny gamma cannot underflow
    e_ratio = (lp_norm(pair.e_part, 2) / pair.gamma) ** 2 / tail_bound_sq(1.0, pair.K)
    return g_ratio, e_ratio


MOMENT_ORDERS = tuple(range(2, 33, 2))


@dataclass(frozen=True, eq=False)
class SubGaussianProfile:
    c1: float
    moments: np.ndarray
    levels: np.ndarray
    tail: np.ndarray
    gauss_ratio: float


def tail_measure(f: SampledFunction, levels) -> np.ndarray:
    """mu(|f| >= lam) for each lam in ``levels``."""
    a = np.abs(f.values)
    levels = np.asarray(levels, dtype=np.float64)
    return np.array([float(f.grid.weights[a >= lam].sum()) for lam in levels])


def subgaussian_profile(f: SampledFunction, A: float, n_levels: int = 64) -> SubGaussianProfile:
    """Moment growth, tail table and Gaussian Orlicz norm of f relative to A."""
    if not A > 0:
        raise ValueError(f"A must be positive, got {A!r}")
    moments = np.array([lp_norm(f, p) for p in MOMENT_ORDERS])
    c1 = float(np.max(moments / (np.sqrt(MOMENT_ORDERS) * A)))
    levels = np.linspace(0.0, float(np.abs(f.values).max()), n_levels)
    return SubGaussianProfile(
        c1=c1,
        moments=moments,
        levels=levels,
        tail=tail_measure(f, levels),
        gauss_ratio=luxemburg_norm(f, OrliczModulus.gauss(1.0)) / A,
    )


def s3_to_s2_violations(f: SampledFunction, A: float, c: float, n_levels: int = 64) -> int | None:
    """If sum w (e^{c|f/A|^2} - 1) <= 1, count levels where mu(|f| >= lam) > 2 e^{-c lam^2/A^2}.

    Returns None when f is not in the hypothesis class.
    """
    with np.errstate(over="ignore"):
        if float(np.dot(f.grid.weights, np.expm1(c * (f.values / A) ** 2))) > 1.0:
            return None
    prof = subgaussian_profile(f, A, n_levels)
    bound = 2.0 * np.exp(-c * prof.levels**2 / A**2)
    return int(np.count_nonzero(prof.tail > bound))


def s1_to_s2_violations(f: SampledFunction, A: float, n_levels: int = 64) -> tuple[int, int]:
    """Moment-to-tail implication with c' = 1/(2 e c^2), C = e, c = measured c1.

    Only levels whose optimising order p* = lam^2/(e c^2 A^2) lies in
    [2, 32] are tested, since the moments are only known there.  Returns
    (violations, levels tested).
    """
    prof = subgaussian_profile(f, A, n_levels)
    cA = prof.c1 * A
    if cA == 0.0:
        return 0, 0
    x2 = (prof.levels / cA) ** 2
    p_star = x2 / math.e
    tested = (p_star >= 2.0) & (p_star <= 32.0)
    bound = math.e * np.exp(-x2 / (2.0 * math.e))
    return int(np.count_nonzero(tested & (prof.tail > bound))), int(np.count_nonzero(tested))

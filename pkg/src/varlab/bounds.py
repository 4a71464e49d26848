"""Monte Carlo and explicit-constant checks of the sparse-vector estimates:
packing versus covering counts, the sparse Gaussian supremum, Dudley's
integral, Gamma_* norms of Gaussian combinations, the B(m, O) probe and the
Hilbert-Schmidt Lipschitz bound."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .orlicz import OrliczModulus, k_star, luxemburg_norm
from .rng import stream
from .systems import OrthogonalMatrix, SampledSystem, _coeff_array, rotate_system

PACKING_MAX_N = 12
PACKING_MAX_STOP = 100_000


def _check_nm(N, m):
    if not 1 <= m <= N:
        raise ValueError(f"need 1 <= m <= N, got m={m}, N={N}")


def _check_eps(eps):
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps!r}")


def covering_bound(N: int, m: int, eps: float) -> tuple[float, float]:
    """C(N, m) (3/eps)^m and its natural log (log computed without overflow)."""
    _check_nm(N, m)
    _check_eps(eps)
    log_value = math.lgamma(N + 1) - math.lgamma(m + 1) - math.lgamma(N - m + 1) + m * math.log(3.0 / eps)
    try:
        value = math.comb(N, m) * (3.0 / eps) ** m
    except OverflowError:
        value = math.inf
    return value, log_value


def packing_ceiling(N: int, m: int, eps: float) -> float:
    """Asserted ceiling for the eps/2-separated sets built by :func:`packing_count`.

    The covering formula, or for m = 1 the exact count of eps/2-separated
    points on N segments [-1, 1] if that is larger (it is when N = 1).
    """
    bound, _ = covering_bound(N, m, eps)
    if m == 1:
        bound = max(bound, N * (math.floor(4.0 / eps) + 1))
    return bound


def packing_volume_bound(N: int, m: int, eps: float) -> float:
    """C(N, m) (1 + 4/eps)^m: disjoint eps/4-balls inside the (1 + eps/4)-ball of each m-subspace.

    This is the bound an eps/2-separated set provably obeys; the covering
    formula used by :func:`packing_ceiling` is smaller and can be exceeded
    (e.g. N = m = 3, eps = 1).
    """
    _check_nm(N, m)
    _check_eps(eps)
    return math.comb(N, m) * (1.0 + 4.0 / eps) ** m


def sample_sparse_ball(N: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point of S_m: a uniform m-subset of coordinates, then uniform in that unit m-ball."""
    support = rng.choice(N, size=m, replace=False)
    direction = rng.standard_normal(m)
    direction /= np.linalg.norm(direction)
    radius = rng.random() ** (1.0 / m)
    x = np.zeros(N)
    x[support] = radius * direction
    return x


def sample_sparse_unit(N: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """Unit vector with a uniformly chosen support of size m."""
    support = rng.choice(N, size=m, replace=False)
    direction = rng.standard_normal(m)
    x = np.zeros(N)
    x[support] = direction / np.linalg.norm(direction)
    return x


@dataclass(frozen=True, eq=False)
class Packing:
    count: int
    points: np.ndarray
    min_dist: float
    proposals: int


def _sparse_ball_batch(N, m, size, rng):
    """``size`` independent uniform points of S_m (rows)."""
    support = np.argsort(rng.random((size, N)), axis=1)[:, :m]
    direction = rng.standard_normal((size, m))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = rng.random(size) ** (1.0 / m)
    x = np.zeros((size, N))
    np.put_along_axis(x, support, radius[:, None] * direction, axis=1)
    return x


def _min_sq_dist(xs, ys, chunk=256):
    """Row-wise min over ys of |x - y|^2."""
    out = np.empty(len(xs))
    yy = (ys * ys).sum(axis=1)
    for i in range(0, len(xs), chunk):
        x = xs[i:i + chunk]
        d = (x * x).sum(axis=1)[:, None] + yy[None, :] - 2.0 * x @ ys.T
        out[i:i + chunk] = d.min(axis=1)
    return out


def packing_count(N: int, m: int, eps: float, seed: int, stop_after: int | None = None) -> Packing:
    """Greedy random packing of S_m with pairwise distance >= eps/2.

    Proposals are examined one at a time in a fixed order; the run stops
    after ``stop_after`` consecutive rejections (default 10 x covering
    bound, capped at 1e5).
    """
    _check_nm(N, m)
    _check_eps(eps)
    if N > PACKING_MAX_N:
        raise ValueError(f"packing limited to N <= {PACKING_MAX_N}, got {N}")
    if stop_after is None:
        stop_after = int(min(PACKING_MAX_STOP, 10 * covering_bound(N, m, eps)[0]))
    rng = stream(seed, "packing", N, m)
    kept = np.empty((64, N))
    count = rejections = proposals = 0
    sep2 = (eps / 2.0) ** 2
    while rejections < stop_after:
        batch = _sparse_ball_batch(N, m, 1024, rng)
        if count:
            d2 = _min_sq_dist(batch, kept[:count])
            # the expanded form can be off by rounding; settle close calls exactly
            for i in np.flatnonzero(np.abs(d2 - sep2) < 1e-9):
                d2[i] = ((kept[:count] - batch[i]) ** 2).sum(axis=1).min()
            near = d2 < sep2
        else:
            near = np.zeros(len(batch), dtype=bool)
        idx = 0
        while idx < len(batch):
            free = np.flatnonzero(~near[idx:])
            run = free[0] if free.size else len(batch) - idx
            if rejections + run >= stop_after:
                proposals += stop_after - rejections
                rejections = stop_after
                break
            rejections += run
            proposals += run
            if not free.size:
                break
            j = idx + run
            x = batch[j]
            proposals += 1
            if count == kept.shape[0]:
                kept = np.concatenate([kept, np.empty_like(kept)])
            kept[count] = x
            count += 1
            rejections = 0
            near[j + 1:] |= ((batch[j + 1:] - x) ** 2).sum(axis=1) < sep2
            idx = j + 1
    return Packing(count, kept[:count].copy(), eps / 2.0, proposals)


def sparse_sup_exact(g, m: int) -> float:
    """sup over S_m of <g, a>: the l2 norm of the m largest |g_i|."""
    g2 = np.sort(np.asarray(g, dtype=np.float64) ** 2)
    return float(math.sqrt(g2[-m:].sum()))


@dataclass(frozen=True, eq=False)
class SupEstimate:
    mean: float
    ratio: float
    values: np.ndarray


def sparse_gaussian_sup(N: int, m: int, trials: int, seed: int) -> SupEstimate:
    """Monte Carlo mean of sup_{a in S_m} <g, a> and its ratio to sqrt(m ln(N/m + 1))."""
    _check_nm(N, m)
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = stream(seed, "sparse-sup", N, m)
    g = rng.standard_normal((trials, N))
    top = np.sqrt(np.sort(g * g, axis=1)[:, -m:].sum(axis=1))
    mean = float(top.mean())
    return SupEstimate(mean, mean / math.sqrt(m * math.log(N / m + 1.0)), top)


def dudley_integral(N: int, m: int, nodes: int = 1024) -> float:
    """int_0^1 sqrt(m ln(N/m + 1) + m ln(3/eps)) d eps.

    Substituting eps = t^2 removes the endpoint singularity; the smooth
    integrand 2t sqrt(...) is then integrated with Gauss-Legendre nodes.
    """
    _check_nm(N, m)
    x, w = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * (x + 1.0)
    base = m * math.log(N / m + 1.0) + m * math.log(3.0)
    integrand = 2.0 * t * np.sqrt(base - 2.0 * m * np.log(t))
    return float(0.5 * np.dot(w, integrand))


@dataclass(frozen=True, eq=False)
class GammaNormEstimate:
    mean: float
    stderr: float
    values: np.ndarray
    K: float


def gaussian_combination_gamma_norm(system: SampledSystem, m: int, trials: int, seed: int) -> GammaNormEstimate:
    """Monte Carlo mean of ||sum g_i phi_i||_{Gamma_K} / sqrt(N), K = k_star(N, m)."""
    if not system.bounded:
        raise ValueError("system must be flagged bounded (sum phi_n^2 <= N)")
    N = system.size
    K = k_star(N, m)
    mod = OrliczModulus.truncated(K)
    rng = stream(seed, "gamma-norm", N, m)
    vals = np.empty(trials)
    for t in range(trials):
        f = system.combination(rng.standard_normal(N))
        vals[t] = luxemburg_norm(f, mod) / math.sqrt(N)
    stderr = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else math.nan
    return GammaNormEstimate(float(vals.mean()), stderr, vals, K)


@dataclass(frozen=True, eq=False)
class ProbeResult:
    max_value: float
    running_max: np.ndarray
    ceiling: float
    K: float


def b_probe(system: SampledSystem, O: OrthogonalMatrix, m: int, probes: int, seed: int) -> ProbeResult:
    """Largest ||sum a_n psi_n||_{Gamma_*} over random unit m-sparse a: a lower estimate of B(m, O).

    ``ceiling`` is e^{K^2/2}, which no probe can exceed.
    """
    if probes < 1:
        raise ValueError("probes must be positive")
    rotated = rotate_system(system, O)
    N = system.size
    K = k_star(N, m)
    mod = OrliczModulus.truncated(K)
    rng = stream(seed, "b-probe", N, m)
    vals = np.empty(probes)
    for t in range(probes):
        vals[t] = luxemburg_norm(rotated.combination(sample_sparse_unit(N, m, rng)), mod)
    running = np.maximum.accumulate(vals)
    return ProbeResult(float(running[-1]), running, math.exp(K * K / 2.0), K)


def hs_lipschitz_check(system: SampledSystem, M, a, m: int) -> float:
    """||sum_{i,n} M_{in} a_i phi_n||_{Gamma_K} / (e^{K^2/2} ||M||_HS ||a||_2), K = k_star(N, m).

    Chain: Gamma_K norm <= e^{K^2/2} L^2 norm (orthonormality)
    <= e^{K^2/2} ||M||_HS ||a||_2 (Cauchy-Schwarz), so the ratio is <= 1.
    """
    N = system.size
    M = np.asarray(M, dtype=np.float64)
    if M.shape != (N, N):
        raise ValueError(f"M must be {N}x{N}, got {M.shape}")
    a = _coeff_array(a, N)
    K = k_star(N, m)
    lhs = luxemburg_norm(system.combination(M.T @ a), OrliczModulus.truncated(K))
    rhs = math.exp(K * K / 2.0) * float(np.linalg.norm(M)) * float(np.linalg.norm(a))
    if rhs == 0.0:
        return 0.0
    return lhs / rhs

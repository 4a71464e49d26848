"""Hard-inequality checks shared by ``varlab selftest`` and the test suite.

Each check returns a list of human-readable violation strings; an empty
list means the inequality held on every sample.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bounds, massdec
from .grid import lp_norm, make_uniform_grid
from .orlicz import (
    OrliczModulus,
    luxemburg_norm,
    s1_to_s2_violations,
    s3_to_s2_violations,
    split_gamma_k,
    split_slack,
)
from .rng import stream
from .systems import haar_orthogonal, rotate_system, trig_system
from .variation import prefix_table

SLACK = 1e-9


def trig_polynomial(N, grid, rng, scale=1.0):
    """Random Gaussian combination of the first N trig functions, plus the system."""
    system = trig_system(N, grid)
    return system.combination(scale * rng.standard_normal(N)), system


def gamma_k_bounds(f, K) -> list[str]:
    """||f||_{Gamma_K} <= ||f||_G and ||f||_{Gamma_K} <= e^{K^2/2} ||f||_2."""
    out = []
    gk = luxemburg_norm(f, OrliczModulus.truncated(K))
    g = luxemburg_norm(f, OrliczModulus.gauss(1.0))
    l2 = lp_norm(f, 2)
    if gk > g * (1 + SLACK):
        out.append(f"Gamma_K norm {gk!r} above Gaussian norm {g!r} (K={K})")
    if gk > math.exp(K * K / 2) * l2 * (1 + SLACK):
        out.append(f"Gamma_K norm {gk!r} above e^(K^2/2) L2 = {math.exp(K * K / 2) * l2!r} (K={K})")
    return out


def split_bounds(f, K) -> list[str]:
    pair = split_gamma_k(f, K)
    g_ratio, e_ratio = split_slack(pair)
    out = []
    if g_ratio > 1 + SLACK:
        out.append(f"||f1||_G / gamma = {g_ratio!r} (K={K})")
    if e_ratio > 1 + SLACK:
        out.append(f"||f2||^2 / ceiling = {e_ratio!r} (K={K})")
    if not np.array_equal(pair.g_part.values + pair.e_part.values, f.values):
        out.append("split parts do not add up to f")
    return out


def subgaussian_implications(f, A, c) -> list[str]:
    out = []
    v3 = s3_to_s2_violations(f, A, c)
    if v3:
        out.append(f"S3 -> S2 failed at {v3} levels (A={A}, c={c})")
    v1, _ = s1_to_s2_violations(f, A)
    if v1:
        out.append(f"S1 -> S2 failed at {v1} levels (A={A})")
    return out


def tree_invariants(tree: massdec.AdmissibleTree) -> list[str]:
    """Tiling, strict left / non-strict right maximality, mass <= 2^-k, unique separators."""
    out = []
    seen = {}
    total = tree.total_exact()
    for (k, s), nd in tree.nodes.items():
        if nd.empty:
            continue
        M = tree.exact_mass(nd.lo, nd.hi)
        if M > total / (2**k):
            out.append(f"M(I_{k},{s}) = {float(M / total)!r} > 2^-{k}")
        i = nd.separator
        if i in seen:
            out.append(f"separator {i} repeated at {(k, s)} and {seen[i]}")
        seen[i] = (k, s)
        left, right = nd.left, nd.right
        left_hi = i - 1 if left.empty else left.hi
        right_lo = i + 1 if right.empty else right.lo
        if not left.empty and left.lo != nd.lo:
            out.append(f"left child of {(k, s)} does not start at {nd.lo}")
        if not right.empty and right.hi != nd.hi:
            out.append(f"right child of {(k, s)} does not end at {nd.hi}")
        if left_hi != i - 1 or right_lo != i + 1 or not nd.lo <= i <= nd.hi:
            out.append(f"children of {(k, s)} do not tile around separator {i}")
            continue
        half = M / 2
        ml = tree.exact_mass(nd.lo, i - 1)
        mr = tree.exact_mass(i + 1, nd.hi)
        if M > 0:
            if not ml < half:
                out.append(f"left child of {(k, s)} has mass >= half")
            if not tree.exact_mass(nd.lo, i) >= half:
                out.append(f"left child of {(k, s)} is not maximal")
        if not mr <= half:
            out.append(f"right child of {(k, s)} has mass > half")
        if M > 0 and not tree.exact_mass(i, nd.hi) > half:
            out.append(f"right child of {(k, s)} is not maximal")
    if sorted(seen) != list(range(1, tree.size + 1)):
        out.append("separators do not enumerate [N]")
    return out


def cover_violations(tree: massdec.AdmissibleTree, J) -> list[str]:
    cov = massdec.admissible_cover(J, tree)
    out = []
    lo, hi = J
    if not (cov.lo <= lo and hi <= cov.hi):
        out.append(f"J={J} not inside cover [{cov.lo}, {cov.hi}]")
    for part in (cov.left, cov.right):
        if part is not None and (part.empty or tree.find(part.lo, part.hi) is None):
            out.append(f"cover part of J={J} is not admissible")
    if cov.left is not None and cov.left.hi + 1 != cov.point:
        out.append(f"left cover part of J={J} does not abut the point")
    if cov.right is not None and cov.right.lo - 1 != cov.point:
        out.append(f"right cover part of J={J} does not abut the point")
    if tree.exact_mass(cov.lo, cov.hi) > 2 * tree.exact_mass(lo, hi):
        out.append(f"M(J~) > 2 M(J) for J={J}")
    return out


def all_covers(tree) -> list[str]:
    out = []
    N = tree.size
    for lo in range(1, N + 1):
        for hi in range(lo, N + 1):
            out.extend(cover_violations(tree, (lo, hi)))
    return out


def majorant_instance(N, m, seed, grid_factor=4, r=3.0):
    """Majorant ratio sup S~/(G~ + E~) on J = [N] for a random m-sparse rotated-trig instance."""
    rng = stream(seed, "majorant", N, m)
    grid = make_uniform_grid(grid_factor * N)
    system = rotate_system(trig_system(N, grid), haar_orthogonal(N, seed))
    a = np.zeros(N)
    a[rng.choice(N, size=m, replace=False)] = rng.standard_normal(m)
    prefix = prefix_table(a, system)
    tree = massdec.build_tree(a * a)
    splits = massdec.blockwise_split(tree, a, system, prefix)
    g, e = massdec.assemble_tilde(splits, tree, r=r)
    return massdec.majorant_audit((1, N), prefix, g, e)


def random_mass(N, rng, zero_fraction=0.2):
    """Gaussian squares with a random fraction of exact zeros (never all zero)."""
    mass = rng.standard_normal(N) ** 2
    mass[rng.random(N) < zero_fraction] = 0.0
    if not mass.any():
        mass[rng.integers(N)] = 1.0
    return mass


@dataclass
class CheckResult:
    name: str
    samples: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def hard_inequality_suite(seed: int = 0, scale: int = 1) -> list[CheckResult]:
    """Every hard inequality of the library on a small seeded batch.

    ``scale`` multiplies the sample counts.
    """
    rng = stream(seed, "selftest")
    results = []
    grid = make_uniform_grid(64)

    def run(name, n, fn):
        bad = []
        for t in range(n):
            bad.extend(fn(t))
        results.append(CheckResult(name, n, bad))

    def poly(t):
        N = 2 * int(rng.integers(1, 9))
        f, _ = trig_polynomial(N, grid, rng, scale=float(rng.uniform(0.05, 2.0)))
        return f

    run("gamma_k_bounds", 20 * scale,
        lambda t: [v for K in (1.0, 1.5, 2.0, 3.0) for v in gamma_k_bounds(poly(t), K)])
    run("split_bounds", 20 * scale,
        lambda t: [v for K in (1.0, 1.5, 2.0) for v in split_bounds(poly(t), K)])

    def subg(t):
        f = poly(t)
        A = float(lp_norm(f, 2)) * float(rng.uniform(0.5, 3.0))
        return subgaussian_implications(f, A, float(rng.uniform(0.1, 1.0)))

    run("subgaussian_implications", 20 * scale, subg)
    run("tree_invariants", 20 * scale,
        lambda t: tree_invariants(massdec.build_tree(random_mass(int(rng.integers(1, 65)), rng))))
    run("admissible_cover", 5 * scale,
        lambda t: all_covers(massdec.build_tree(random_mass(int(rng.integers(1, 25)), rng))))

    def majorant(t):
        m = (1, 4, 16)[t % 3]
        ratio = majorant_instance(16, m, seed * 1000 + t)
        return [] if ratio <= 2.0 else [f"majorant ratio {ratio!r} > 2 (N=16, m={m})"]

    run("majorant", 3 * scale, majorant)

    def packing(t):
        N, m = ((4, 2), (6, 2), (6, 3), (8, 2))[t % 4]
        out = []
        for eps in (0.5, 1.0):
            pk = bounds.packing_count(N, m, eps, seed * 1000 + t, stop_after=200)
            ceiling = bounds.packing_ceiling(N, m, eps)
            if pk.count > ceiling:
                out.append(f"packing {pk.count} > {ceiling} at N={N}, m={m}, eps={eps}")
        return out

    run("packing", 4 * scale, packing)

    def hs(t):
        N = 2 * int(rng.integers(1, 9))
        system = trig_system(N, grid)
        m = int(rng.integers(1, N + 1))
        ratio = bounds.hs_lipschitz_check(system, rng.standard_normal((N, N)), rng.standard_normal(N), m)
        return [] if ratio <= 1 + SLACK else [f"HS ratio {ratio!r} > 1 (N={N}, m={m})"]

    run("hs_lipschitz", 20 * scale, hs)

    def probe(t):
        N = 2 * int(rng.integers(1, 9))
        system = trig_system(N, grid)
        m = int(rng.integers(1, N + 1))
        res = bounds.b_probe(system, haar_orthogonal(N, seed * 1000 + t), m, 10, seed * 1000 + t)
        return [] if res.max_value <= res.ceiling * (1 + SLACK) else [
            f"probe {res.max_value!r} > e^(K^2/2) = {res.ceiling!r} (N={N}, m={m})"]

    run("b_probe_ceiling", 5 * scale, probe)
    return results


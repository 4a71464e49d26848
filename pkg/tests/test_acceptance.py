"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line; the lines are printed together in
the terminal summary (see conftest.py).
"""
import math
import time

import numpy as np
import pytest

from varlab import bounds, cli, massdec
from varlab.checks import (
    all_covers,
    gamma_k_bounds,
    majorant_instance,
    random_mass,
    split_bounds,
    subgaussian_implications,
    tree_invariants,
)
from varlab.experiments import ExperimentConfig, median_of, run
from varlab.grid import SampledFunction, lp_norm, make_uniform_grid
from varlab.orlicz import OrliczModulus, luxemburg_norm, split_gamma_k, split_slack
from varlab.rng import stream
from varlab.systems import (
    haar_orthogonal,
    reweight_system,
    rotate_system,
    trig_system,
    truncate_system,
    unit_vector_system,
)
from varlab.variation import maximal_field, prefix_table, v_r_bruteforce, v_r_pointwise

RESULTS = []


def record(num, title, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  [{num:2d}] {title}: {detail}"
    RESULTS.append((num, line))
    print(line)
    return ok


def _poly(rng, grid, max_half=16):
    N = 2 * int(rng.integers(1, max_half + 1))
    scale = float(np.exp(rng.uniform(-3, 2)))
    return trig_system(N, grid).combination(scale * rng.standard_normal(N))


def test_01_oracle_equivalence():
    rng = stream(1, "acc-oracle")
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(500):
        N = int(rng.integers(1, 13))
        d = rng.standard_normal(N)
        for r in (2.0, 3.0):
            fast, slow = v_r_pointwise(d, r), v_r_bruteforce(d, r)
            worst = max(worst, abs(fast - slow) / max(slow, 1e-300))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 10
    assert record(1, "oracle equivalence", ok, f"max rel err {worst:.2e}, {elapsed:.1f}s")


def test_02_system_integrity():
    flat, pars = 0.0, 0.0
    systems = []
    for N in (2, 16, 64, 256, 1024):
        base = trig_system(N, make_uniform_grid(4 * N))
        flat = max(flat, float(np.abs((base.values**2).sum(axis=0) - N).max()))
        systems += [base, rotate_system(base, haar_orthogonal(N, N))]
    odd = truncate_system(rotate_system(trig_system(16, make_uniform_grid(64)), haar_orthogonal(16, 1)), 5)
    systems += [unit_vector_system(32), odd, reweight_system(odd)[0]]
    gram = max(s.gram_error() for s in systems)
    rng = stream(2, "acc-parseval")
    for t in range(100):
        s = systems[t % len(systems)]
        a = rng.standard_normal(s.size)
        pars = max(pars, abs(lp_norm(s.combination(a), 2) ** 2 / float(a @ a) - 1))
    ok = gram < 1e-8 and flat <= 1e-9 and pars <= 1e-8
    assert record(2, "system integrity", ok, f"gram {gram:.1e}, sum phi^2 dev {flat:.1e}, Parseval {pars:.1e}")


def test_03_gamma_k_bounds():
    rng = stream(3, "acc-lemma21")
    grid = make_uniform_grid(128)
    t0 = time.perf_counter()
    bad = []
    for _ in range(1000):
        f = _poly(rng, grid)
        for K in (1.0, 1.5, 2.0, 3.0):
            bad += gamma_k_bounds(f, K)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 30
    assert record(3, "Gamma_K <= G and <= e^(K^2/2) L2", ok, f"{len(bad)} violations in 4000 checks, {elapsed:.1f}s")


def test_04_split_bounds():
    rng = stream(4, "acc-lemma22")
    grid = make_uniform_grid(128)
    bad, g_worst, e_worst = [], 0.0, 0.0
    for i in range(1000):
        f = _poly(rng, grid)
        if i % 4 == 0:
            # spiky functions exercise the tail branch
            v = f.values.copy()
            v[rng.integers(len(v))] *= 40
            f = SampledFunction(v, grid)
        for K in (1.0, 1.5, 2.0):
            bad += split_bounds(f, K)
            g, e = split_slack(split_gamma_k(f, K))
            g_worst, e_worst = max(g_worst, g), max(e_worst, e)
    assert record(4, "split bounds", not bad,
                  f"{len(bad)} violations; worst ||f1||_G/gamma {g_worst:.3f}, ||f2||^2/ceiling {e_worst:.3f}")


def test_05_subgaussian_implications():
    rng = stream(5, "acc-lemma42")
    grid = make_uniform_grid(256)
    bad, tested = [], 0
    for i in range(500):
        if i % 2:
            f = _poly(rng, grid)
        else:
            f = SampledFunction(rng.standard_normal(256) * float(np.exp(rng.uniform(-2, 2))), grid)
        c = float(rng.uniform(0.1, 2.0))
        # A at or above the G(c) norm puts f in S3(c), so the first implication is exercised
        A = luxemburg_norm(f, OrliczModulus.gauss(c)) * float(rng.uniform(1.0, 2.0))
        bad += subgaussian_implications(f, A, c)
        tested += 1
    assert record(5, "sub-Gaussian implications", not bad, f"{len(bad)} violations over {tested} functions")


def test_06_tree_invariants():
    rng = stream(6, "acc-tree")
    bad, nodes = [], 0
    for N in (16, 64, 256):
        for _ in range(100):
            tree = massdec.build_tree(random_mass(N, rng))
            nodes += len(tree.nodes)
            bad += tree_invariants(tree)
    assert record(6, "mass-decomposition invariants", not bad, f"{len(bad)} violations over {nodes} nodes")


def test_07_cover():
    rng = stream(7, "acc-cover")
    t0 = time.perf_counter()
    bad, count = [], 0
    for N in (32, 64):
        for _ in range(100):
            bad += all_covers(massdec.build_tree(random_mass(N, rng)))
            count += N * (N + 1) // 2
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 60
    assert record(7, "admissible cover", ok, f"{len(bad)} violations over {count} intervals, {elapsed:.1f}s")


def test_08_majorant():
    worst = 0.0
    for m in (8, 64, 256):
        for t in range(50):
            worst = max(worst, majorant_instance(256, m, 8000 + 100 * m + t))
    assert record(8, "majorant S~ <= 2(G~ + E~)", worst <= 2.0, f"max ratio {worst:.4f} over 150 instances")


@pytest.mark.slow
def test_09_packing():
    worst, bad = 0.0, []
    for N, m in ((4, 2), (6, 2), (6, 3), (8, 2)):
        for eps in (0.5, 1.0):
            ceiling = bounds.packing_ceiling(N, m, eps)
            for seed in range(5):
                c = bounds.packing_count(N, m, eps, seed).count
                worst = max(worst, c / ceiling)
                if c > ceiling:
                    bad.append((N, m, eps, seed, c, ceiling))
    assert record(9, "packing <= ceiling", not bad, f"{len(bad)} violations, max count/ceiling {worst:.3f}")


def test_10_sparse_sup():
    worst = 0.0
    for N in (256, 1024, 4096):
        for m in sorted({1, math.isqrt(N), N // 4}):
            worst = max(worst, bounds.sparse_gaussian_sup(N, m, 200, 10).ratio)
    assert record(10, "sparse Gaussian sup ratio <= 3", worst <= 3, f"max ratio {worst:.3f}")


@pytest.mark.slow
def test_11_scaling():
    Ns = [64, 256, 1024]
    rows = run(ExperimentConfig(experiment="scaling", Ns=Ns, trials=50, seed=11, regimes=["ones"]))
    trig = [median_of(rows, "trig:ones", N) for N in Ns]
    rot = [median_of(rows, "rotated:ones", N) for N in Ns]
    ordered = all(r < t for r, t, N in zip(rot, trig, Ns) if N >= 256)
    norm = [r / math.sqrt(math.log(math.log(N))) for r, N in zip(rot, Ns)]
    spread = (max(norm) - min(norm)) / min(norm)
    gap = [t - r for t, r in zip(trig, rot)]
    widening = all(b > a for a, b in zip(gap, gap[1:]))
    ok = ordered and spread <= 0.5 and widening
    assert record(11, "scaling, all-ones regime", ok,
                  f"trig {np.round(trig, 4).tolist()}, rotated {np.round(rot, 4).tolist()}, "
                  f"rotated/sqrt(lnlnN) spread {spread:.1%}, gap {np.round(gap, 4).tolist()}")


@pytest.mark.slow
def test_12_lil():
    rows = run(ExperimentConfig(experiment="lil", Ns=[2**10, 2**15], trials=8, seed=12))
    med = median_of(rows, N=2**15, statistic="lil")
    ratio = median_of(rows, N=2**15, statistic="v2sq") / median_of(rows, N=2**10, statistic="v2sq")
    ok = 0.6 <= med <= 2.0 and 16 <= ratio <= 64
    assert record(12, "variational LIL", ok, f"median statistic {med:.3f}, raw V2^2 median ratio {ratio:.1f}")


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="E~ vanishes identically for sparse coefficients at this grid size, "
                                       "so the m=4 and m=32 medians tie at 0")
def test_13_e_tilde_decay():
    ms = [4, 32, 256]
    rows = run(ExperimentConfig(experiment="decompose", Ns=[1024], ms=ms, trials=20, seed=13))
    med = [median_of(rows, N=1024, m=m, statistic="e_ratio") for m in ms]
    mean = [float(np.mean([r.value for r in rows if r.m == m and r.statistic == "e_ratio"])) for m in ms]
    nonzero = [sum(1 for r in rows if r.m == m and r.statistic == "e_ratio" and r.value > 0) for m in ms]
    ok = all(b > a for a, b in zip(med, med[1:]))
    assert record(13, "E~ decay (median strictly increasing in m)", ok,
                  f"medians {np.round(med, 4).tolist()}, means {np.round(mean, 4).tolist()}, "
                  f"nonzero trials {nonzero} of 20")


def test_14_change_of_measure():
    rng = stream(14, "acc-measure")
    worst = 0.0
    for t in range(100):
        N = 2 * int(rng.integers(2, 17))
        base = rotate_system(trig_system(N, make_uniform_grid(4 * N)), haar_orthogonal(N, 1400 + t))
        if t % 2 == 0:
            base = truncate_system(base, int(rng.integers(1, N)))
        a = rng.standard_normal(base.size)
        psi, nu = reweight_system(base)
        w = base.grid.weights
        lhs = float(w @ maximal_field(prefix_table(a, base)).values ** 2)
        rhs = float((w * nu.values) @ maximal_field(prefix_table(a, psi)).values ** 2)
        worst = max(worst, abs(lhs - rhs) / lhs)
    assert record(14, "change-of-measure identity", worst <= 1e-10, f"max rel diff {worst:.1e} (half non-flat)")


def test_15_grid_doubling():
    cfg = dict(experiment="scaling", Ns=[256], trials=10, seed=15)
    coarse = run(ExperimentConfig(grid_factor=4, **cfg))
    fine = run(ExperimentConfig(grid_factor=8, **cfg))
    diffs = [abs(f.value / c.value - 1) for c, f in zip(coarse, fine) if c.statistic == "v2ratio"]
    worst = max(diffs)
    assert record(15, "grid adequacy 4N -> 8N", worst < 0.01, f"max change {worst:.2e} over {len(diffs)} rows")


def test_16_determinism(tmp_path, capsys):
    outs = []
    for threads in ("1", "4", "1"):
        dest = tmp_path / f"run{len(outs)}.csv"
        code = cli.main(["scaling", "--Ns", "64,256", "--trials", "4", "--seed", "16",
                         "--threads", threads, "--out", str(dest)])
        assert code == 0
        outs.append(dest.read_bytes())
    capsys.readouterr()
    ok = outs[0] == outs[1] == outs[2]
    assert record(16, "byte-identical CSV across --threads", ok, f"{len(outs[0])} bytes, threads 1/4/1")

"""Compiled vs numpy r-variation kernel.

    python3 benchmarks/bench_kernels.py [--Ns 64,256,1024] [--repeat 3] [--threads 1,4]

Times ``vr_power_field`` on the prefix table of an all-ones trig combination
(X = 4N grid points) and reports the speed-up of the extension over the
fallback along with the largest relative disagreement.
"""
from __future__ import annotations

import argparse
import os
import time

import numpy as np

from varlab import _fallback
from varlab.grid import make_uniform_grid
from varlab.systems import trig_system
from varlab.variation import prefix_table

try:
    from varlab import _kernels
except ImportError:
    _kernels = None


def _best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench(Ns=(64, 256, 1024), repeat=3, threads=(1,), r=2.0):
    rows = []
    for N in Ns:
        system = trig_system(N, make_uniform_grid(4 * N))
        by_point = np.ascontiguousarray(prefix_table(np.ones(N), system).P.T)
        t_py, ref = _best_time(lambda: _fallback.vr_power_field(by_point, r), repeat)
        rows.append((N, "python", 1, t_py, 1.0, 0.0))
        if _kernels is None:
            continue
        for th in threads:
            t_cy, out = _best_time(lambda: _kernels.vr_power_field(by_point, r, th), repeat)
            err = float(np.max(np.abs(np.asarray(out) - ref) / np.abs(ref)))
            rows.append((N, "cython", th, t_cy, t_py / t_cy, err))
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--Ns", default="64,256,1024")
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--threads", default=f"1,{os.cpu_count() or 1}")
    p.add_argument("--r", type=float, default=2.0)
    args = p.parse_args(argv)
    Ns = [int(x) for x in args.Ns.split(",")]
    threads = sorted({int(x) for x in args.threads.split(",")})
    if _kernels is None:
        print("compiled extension not built; timing the fallback only")
    print(f"{'N':>6} {'backend':>8} {'threads':>7} {'seconds':>10} {'speedup':>8} {'max rel diff':>13}")
    for N, name, th, t, sp, err in bench(Ns, args.repeat, threads, args.r):
        print(f"{N:6d} {name:>8} {th:7d} {t:10.4f} {sp:8.1f} {err:13.1e}")


if __name__ == "__main__":
    main()

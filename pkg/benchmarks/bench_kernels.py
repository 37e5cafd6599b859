"""Numba kernels against their numpy twins on the hot paths.

Run with ``python3 benchmarks/bench_kernels.py [--repeat 3] [--scale 1.0]``.
Each case runs once per backend to warm the JIT and check the outputs agree
bit for bit, then reports the best of ``--repeat`` timed runs.
"""

import argparse
import time

import numpy as np

from limitlab import backend, distributions as dist, steinlab as sl
from limitlab._accel import HAVE_NUMBA
from limitlab.rng import RngStream


def cases(scale):
    m = max(1000, int(100_000 * scale))
    return [
        ("descents n=100", lambda: dist.mc_sample(dist.Statistic.descents(100), m, RngStream(1))),
        ("aps n=101 p=1/2", lambda: dist.mc_sample(dist.Statistic.aps(101, 0.5), m, RngStream(1))),
        ("aps n=53 k=26", lambda: dist.mc_sample(dist.Statistic.aps_fixed_k(53, 26), m, RngStream(1))),
        ("continuous n=23", lambda: dist.mc_sample(dist.Statistic.aps_continuous_binned(23), m, RngStream(1))),
        ("exchangeable n=13 k=6", lambda: sl.exchangeable_verify(13, 6).max_residual_exact),
        ("dependency graph n=101", lambda: sl.dependency_graph(101).max_degree),
    ]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def same(a, b):
    if isinstance(a, np.ndarray):
        return a.dtype == b.dtype and np.array_equal(a, b)
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--scale", type=float, default=1.0, help="multiplier on Monte Carlo sample counts")
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return 1
    print(f"{'case':26s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}  agree")
    for name, fn in cases(args.scale):
        with backend("numpy"):
            ref = fn()
            t_np = best_of(fn, args.repeat)
        with backend("numba"):
            got = fn()
            t_nb = best_of(fn, args.repeat)
        print(f"{name:26s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}x  {same(ref, got)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

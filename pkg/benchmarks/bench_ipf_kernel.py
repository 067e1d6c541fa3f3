"""Time the compiled IPF loop against the numpy fallback.

    python benchmarks/bench_ipf_kernel.py [--repeat 5] [--iterations 200]

Each case runs up to a fixed number of row+column sweeps on a random positive
seed. Tolerance is 0, so a loop only stops early when the margins are hit
exactly, which can happen for tiny tables.
"""
import argparse
import timeit

import numpy as np

from nmipf import _ipf_kernel_py

try:
    from nmipf import _ipf_kernel
except ImportError:
    _ipf_kernel = None

SHAPES = [(2, 2), (3, 3), (10, 10), (50, 50), (200, 200)]


def _case(shape, rng):
    z = rng.uniform(0.1, 10.0, size=shape)
    rows = rng.uniform(1.0, 10.0, size=shape[0])
    cols = rng.uniform(1.0, 10.0, size=shape[1])
    cols *= rows.sum() / cols.sum()
    return z, rows, cols


def _time(loop, z, rows, cols, iterations, repeat):
    def run():
        loop(z.copy(), rows, cols, iterations, 0.0)

    return min(timeit.repeat(run, number=1, repeat=repeat))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--iterations", type=int, default=200)
    args = p.parse_args(argv)

    rng = np.random.default_rng(0)
    print(f"{'shape':>10} {'python ms':>11} {'cython ms':>11} {'speedup':>8}")
    for shape in SHAPES:
        z, rows, cols = _case(shape, rng)
        t_py = _time(_ipf_kernel_py.ipf_loop, z, rows, cols, args.iterations, args.repeat)
        if _ipf_kernel is None:
            print(f"{str(shape):>10} {t_py * 1e3:11.3f} {'n/a':>11} {'n/a':>8}")
            continue
        t_cy = _time(_ipf_kernel.ipf_loop, z, rows, cols, args.iterations, args.repeat)
        print(f"{str(shape):>10} {t_py * 1e3:11.3f} {t_cy * 1e3:11.3f} {t_py / t_cy:8.1f}x")


if __name__ == "__main__":
    main()

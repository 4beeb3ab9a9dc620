"""Compare numba and numpy DES kernels on identical inputs.

Usage: python3 benchmarks/bench_kernels.py [--n 1000000] [--repeat 5]
"""
import argparse
import time

import numpy as np

from aoi_ntn._accel import NUMBA_ENABLED
from aoi_ntn.des import kernels


def best_of(fn, args, repeat):
    fn(*args)  # warm-up (numba compile / cache load)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    t = np.cumsum(rng.exponential(1.0, args.n))
    s = rng.exponential(0.8, args.n)

    pairs = [("loss_server", kernels.loss_server_numpy, kernels.loss_server_numba),
             ("lindley", kernels.lindley_numpy, kernels.lindley_numba)]
    print(f"n = {args.n}, numba enabled: {NUMBA_ENABLED}")
    print(f"{'kernel':<12} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8}")
    for name, np_fn, nb_fn in pairs:
        a = best_of(np_fn, (t, s), args.repeat)
        if NUMBA_ENABLED:
            b = best_of(nb_fn, (t, s), args.repeat)
            print(f"{name:<12} {1e3 * a:11.2f} {1e3 * b:11.2f} {a / b:8.1f}")
        else:
            print(f"{name:<12} {1e3 * a:11.2f} {'n/a':>11} {'n/a':>8}")


if __name__ == "__main__":
    main()

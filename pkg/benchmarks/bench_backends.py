"""Compare the numba kernels against their pure-numpy fallbacks.

Run with ``python3 benchmarks/bench_backends.py``.  Each kernel is called once
to trigger compilation, then timed as the best of several repeats.  Outputs
are checked for agreement before timing.
"""
import argparse
import math
import time

import numpy as np

from micromacro import _kernels
from micromacro._backend import HAS_NUMBA


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n_trials, cutoff):
    rng = np.random.default_rng(0)
    cdf = np.cumsum(rng.random(20_000))
    cdf /= cdf[-1]
    u = rng.random(n_trials)
    alice = rng.choice(np.array([-1, 1], dtype=np.int8), n_trials)
    dp = rng.poisson(66, n_trials).astype(np.float64)
    dm = rng.poisson(66, n_trials).astype(np.float64)
    thr = np.array([0.0, 100.0, 300.0, 530.0])
    s = 1 / math.sqrt(2)
    e = 1j
    return {
        "cdf_lookup": (lambda k: k(cdf, u), np.testing.assert_array_equal),
        "classify_counts": (lambda k: k(alice, dp, dm, thr),
                            lambda a, b: np.testing.assert_array_equal(a[0], b[0])),
        "rotation_sectors": (lambda k: k(cutoff, s, s * e, s, -s * e),
                             lambda a, b: np.testing.assert_allclose(a, b, atol=1e-12)),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=2_000_000)
    ap.add_argument("--cutoff", type=int, default=60)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args(argv)
    if not HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'kernel':<18}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, (call, check) in cases(args.trials, args.cutoff).items():
        k_np = getattr(_kernels, f"{name}_numpy")
        k_nb = getattr(_kernels, f"{name}_numba")
        check(call(k_np), call(k_nb))  # also compiles the numba kernel
        t_np = best_of(lambda: call(k_np), args.repeats)
        t_nb = best_of(lambda: call(k_nb), args.repeats)
        print(f"{name:<18}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()

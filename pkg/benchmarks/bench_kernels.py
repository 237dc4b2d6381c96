"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--n 4096] [--repeat 5]

Inputs are the ones the library builds for the dyadic-block weights on T1
(dual spectral radius) and a default-weight T4 (radius of convergence).
"""

import argparse
import statistics
import time

import numpy as np

from shifttree import WeightedShift, builtin
from shifttree import _kernels
from shifttree.shift import GENERATOR_HORIZON
from shifttree.weights import WeightSequence


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def window_inputs(n):
    seq = WeightSequence((), None, "dyadic_blocks").reciprocal()
    P = np.concatenate(([0.0], np.cumsum(np.log(seq.values(GENERATOR_HORIZON + n)))))
    return P, 0, GENERATOR_HORIZON, n


def logsum_inputs(n):
    S = WeightedShift.default(builtin("T4")).dual
    kT = S.tree.branching_index
    L, member, _ = S.lineage_table(n + kT)
    return L, member, kT, n


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    cases = [
        ("window_extrema", window_inputs(args.n), _kernels.window_extrema_np, _kernels.window_extrema_nb),
        ("radius_logsums", logsum_inputs(args.n), _kernels.radius_logsums_np, _kernels.radius_logsums_nb),
    ]
    print(f"{'kernel':<16}{'numpy (s)':>12}{'numba (s)':>12}{'speedup':>10}  max |diff|")
    for name, inputs, f_np, f_nb in cases:
        f_nb(*inputs)  # compile outside the timing
        a, b = np.asarray(f_np(*inputs)), np.asarray(f_nb(*inputs))
        t_np, _ = best_of(lambda: f_np(*inputs), args.repeat)
        t_nb, _ = best_of(lambda: f_nb(*inputs), args.repeat)
        diff = float(np.abs(a - b).max())
        print(f"{name:<16}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.1f}x  {diff:.2e}")


if __name__ == "__main__":
    main()

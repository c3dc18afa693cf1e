#!/usr/bin/env python3
"""Times the hot kernels under the numba backend and the pure-numpy fallback.

Run from the repo root:

    python3 benchmarks/bench_backends.py

The same physical kernels are what FRACFILT_BACKEND selects at import time;
this script imports both implementation modules directly so one process can
compare them.
"""

import time

import numpy as np

from fracfilt import kernels_numpy

try:
    from fracfilt import kernels_numba
except ImportError:
    kernels_numba = None


def timeit(fn, *args, repeat=30):
    fn(*args)  # warm-up / JIT compile
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat


def workloads(rng):
    x44 = np.ascontiguousarray(rng.random((44, 44)))
    k1 = np.ascontiguousarray(rng.random((64, 9, 9)) - 0.5)
    f2 = np.ascontiguousarray(rng.random((32, 36, 36)))
    k3 = np.ascontiguousarray(rng.random((32, 5, 5)) - 0.5)
    s = np.ascontiguousarray(rng.random((32, 32)) - 0.5)
    xi = np.ascontiguousarray(rng.integers(0, 256, (44, 44)), dtype=np.int64)
    coef = np.ascontiguousarray(rng.integers(-80, 80, (13, 13)), dtype=np.int64)
    taps = np.array([-1, 4, -11, 40, 40, -11, 4, -1], dtype=np.int64)
    cur = np.ascontiguousarray(rng.integers(0, 256, (16, 16)), dtype=np.int64)
    ref = np.ascontiguousarray(rng.integers(0, 256, (96, 96)), dtype=np.int64)
    offs = np.array(
        sorted(
            ((dy, dx) for dy in range(-8, 9) for dx in range(-8, 9)),
            key=lambda t: (abs(t[0]) + abs(t[1]), t[0], t[1]),
        ),
        dtype=np.int64,
    )
    return [
        ("xcorr2 44x44 * 13x13", "xcorr2", (x44, np.ascontiguousarray(rng.random((13, 13))))),
        ("xcorr2_bank 64 x 9x9 (layer 1)", "xcorr2_bank", (x44, k1)),
        ("xcorr2_stack_sum 32 x 5x5 (layer 3)", "xcorr2_stack_sum", (f2, k3)),
        ("conv2_full_stack 32x32 * 32 x 5x5 (backprop)", "conv2_full_stack", (s, k3)),
        ("filter13_fixed 32x32 block", "filter13_fixed", (xi, coef, 6, 255)),
        ("tap_filter_cols 8-tap", "tap_filter_cols", (xi, taps)),
        ("int_search 16x16, +-8", "int_search", (cur, ref, 40, 40, offs)),
    ]


def main():
    rng = np.random.default_rng(0)
    impls = [("numpy", kernels_numpy)]
    if kernels_numba is not None:
        impls.append(("numba", kernels_numba))
    print(f"{'kernel':<46}" + "".join(f"{name:>12}" for name, _ in impls) + f"{'ratio':>9}")
    for label, fname, args in workloads(rng):
        times = [timeit(getattr(mod, fname), *args) for _, mod in impls]
        row = f"{label:<46}" + "".join(f"{t * 1e6:>10.1f}us" for t in times)
        if len(times) == 2 and times[1] > 0:
            row += f"{times[0] / times[1]:>8.1f}x"
        print(row)


if __name__ == "__main__":
    main()

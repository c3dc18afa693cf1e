"""Backend dispatch for the hot kernels.

FRACFILT_BACKEND=numpy forces the pure-numpy path, FRACFILT_BACKEND=numba
requires numba; the default (auto) uses numba when importable and falls back
to numpy otherwise. benchmarks/bench_backends.py compares the two.
"""

import os

_choice = os.environ.get("FRACFILT_BACKEND", "auto").strip().lower()

if _choice in ("numpy", "np"):
    from . import kernels_numpy as _impl
elif _choice in ("numba", "nb"):
    from . import kernels_numba as _impl
elif _choice in ("auto", ""):
    try:
        from . import kernels_numba as _impl
    except ImportError:
        from . import kernels_numpy as _impl
else:
    raise ValueError(f"unknown FRACFILT_BACKEND {_choice!r} (use auto, numba or numpy)")

BACKEND = _impl.NAME

xcorr2 = _impl.xcorr2
xcorr2_bank = _impl.xcorr2_bank
xcorr2_stack_sum = _impl.xcorr2_stack_sum
xcorr2_with_shared = _impl.xcorr2_with_shared
conv2_full = _impl.conv2_full
conv2_full_stack = _impl.conv2_full_stack
filter13_fixed = _impl.filter13_fixed
tap_filter_cols = _impl.tap_filter_cols
tap_filter_rows = _impl.tap_filter_rows
int_search = _impl.int_search

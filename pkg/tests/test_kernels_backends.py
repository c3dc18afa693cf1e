"""Cross-checks the numba kernels against the pure-numpy fallback.

Integer kernels must agree bit-exactly; float kernels may differ by
summation order only.
"""

import numpy as np
import pytest

from fracfilt import kernels_numpy

try:
    from fracfilt import kernels_numba

    IMPLS = (kernels_numpy, kernels_numba)
except ImportError:  # pragma: no cover
    IMPLS = (kernels_numpy,)

needs_both = pytest.mark.skipif(len(IMPLS) < 2, reason="numba unavailable")


@needs_both
def test_xcorr_kernels_agree(rng):
    a, b = IMPLS
    x = np.ascontiguousarray(rng.random((24, 20)))
    k = np.ascontiguousarray(rng.random((5, 5)) - 0.5)
    ks = np.ascontiguousarray(rng.random((6, 9, 9)) - 0.5)
    assert np.allclose(a.xcorr2(x, k), b.xcorr2(x, k), atol=1e-10, rtol=0)
    assert np.allclose(a.xcorr2_bank(x, ks), b.xcorr2_bank(x, ks), atol=1e-10, rtol=0)


@needs_both
def test_stack_kernels_agree(rng):
    a, b = IMPLS
    xs = np.ascontiguousarray(rng.random((6, 14, 12)))
    ks = np.ascontiguousarray(rng.random((6, 5, 5)) - 0.5)
    p = np.ascontiguousarray(rng.random((10, 8)) - 0.5)
    assert np.allclose(a.xcorr2_stack_sum(xs, ks), b.xcorr2_stack_sum(xs, ks), atol=1e-10, rtol=0)
    assert np.allclose(
        a.xcorr2_with_shared(xs, p), b.xcorr2_with_shared(xs, p), atol=1e-10, rtol=0
    )
    s = np.ascontiguousarray(rng.random((7, 9)) - 0.5)
    assert np.allclose(a.conv2_full_stack(s, ks), b.conv2_full_stack(s, ks), atol=1e-10, rtol=0)
    k1 = np.ascontiguousarray(rng.random((4, 3)))
    k2 = np.ascontiguousarray(rng.random((3, 5)))
    assert np.allclose(a.conv2_full(k1, k2), b.conv2_full(k1, k2), atol=1e-12, rtol=0)


@needs_both
def test_integer_kernels_bit_exact(rng):
    a, b = IMPLS
    x = np.ascontiguousarray(rng.integers(0, 256, (30, 28)), dtype=np.int64)
    coef = np.ascontiguousarray(rng.integers(-80, 80, (13, 13)), dtype=np.int64)
    assert np.array_equal(a.filter13_fixed(x, coef, 6, 255), b.filter13_fixed(x, coef, 6, 255))

    taps = np.array([-1, 4, -11, 40, 40, -11, 4, -1], dtype=np.int64)
    assert np.array_equal(a.tap_filter_cols(x, taps), b.tap_filter_cols(x, taps))
    assert np.array_equal(a.tap_filter_rows(x, taps), b.tap_filter_rows(x, taps))

    cur = np.ascontiguousarray(rng.integers(0, 256, (8, 8)), dtype=np.int64)
    ref = np.ascontiguousarray(rng.integers(0, 256, (40, 40)), dtype=np.int64)
    offs = np.array(
        sorted(
            ((dy, dx) for dy in range(-4, 5) for dx in range(-4, 5)),
            key=lambda t: (abs(t[0]) + abs(t[1]), t[0], t[1]),
        ),
        dtype=np.int64,
    )
    assert a.int_search(cur, ref, 12, 12, offs) == b.int_search(cur, ref, 12, 12, offs)

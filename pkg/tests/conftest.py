"""Shared test helpers: independent loop oracles and content generators.

The oracles here are deliberately written as plain double loops, separate
from the library's vectorized/compiled paths, so they can serve as
independent references.
"""

import numpy as np
import pytest

from fracfilt.stdfilters import std_coeffs


def xcorr_oracle(x, k):
    """Brute-force valid cross-correlation."""
    kh, kw = k.shape
    ho = x.shape[0] - kh + 1
    wo = x.shape[1] - kw + 1
    out = np.zeros((ho, wo))
    for r in range(ho):
        for c in range(wo):
            s = 0.0
            for u in range(kh):
                for v in range(kw):
                    s += x[r + u, c + v] * k[u, v]
            out[r, c] = s
    return out


def conv_full_oracle(a, b):
    """Brute-force full convolution of two kernels."""
    ah, aw = a.shape
    bh, bw = b.shape
    out = np.zeros((ah + bh - 1, aw + bw - 1))
    for i in range(ah):
        for j in range(aw):
            for u in range(bh):
                for v in range(bw):
                    out[i + u, j + v] += a[i, j] * b[u, v]
    return out


def smooth_plane(rng, h, w, depth=255):
    """Natural-statistics 8-bit content: box-blurred uniform noise, full range."""
    x = rng.random((h + 8, w + 8))
    k = np.ones(5) / 5
    x = np.apply_along_axis(lambda r: np.convolve(r, k, "valid"), 1, x)
    x = np.apply_along_axis(lambda c: np.convolve(c, k, "valid"), 0, x)
    x = x[:h, :w]
    x = (x - x.min()) / (x.max() - x.min() + 1e-12)
    return np.clip(np.rint(x * depth), 0, depth).astype(np.uint8)


def tap_vector_13(phase):
    """The 13-entry unit-DC tap vector of one standard phase (delta for 0)."""
    v = np.zeros(13)
    if phase == 0:
        v[6] = 1.0
    else:
        t = std_coeffs(phase)
        for k, c in enumerate(t.taps):
            v[6 + t.anchor + k] = c / 64.0
    return v


def std_filter_13(frac):
    """The separable standard filter expressed as a full 13x13 interpolation
    filter (DC gain 1); subtract the center delta for the residual form."""
    dx, dy = frac
    return np.outer(tap_vector_13(dy), tap_vector_13(dx))


def residual_delta():
    d = np.zeros((13, 13))
    d[6, 6] = 1.0
    return d


def synthetic_clip(rng, w, h, n_frames, steps=None, smooth=3):
    """Frames panning across a smooth 4x-supersampled master texture by a
    cycling list of quarter-pel steps; exercises sub-pel motion estimation
    across many fractional phases."""
    if steps is None:
        steps = [(1, 1), (2, 1), (1, 2), (3, 1), (1, 3), (2, 3), (3, 2), (1, 0), (0, 1)]
    span = sum(max(abs(sx), abs(sy)) for sx, sy in steps) * (n_frames // len(steps) + 1)
    mh = 4 * h + 4 * span + 64
    mw = 4 * w + 4 * span + 64
    master = rng.random((mh, mw))
    k = np.ones(4 * smooth) / (4 * smooth)
    master = np.apply_along_axis(lambda r: np.convolve(r, k, "same"), 1, master)
    master = np.apply_along_axis(lambda c: np.convolve(c, k, "same"), 0, master)
    master = (master - master.min()) / (master.max() - master.min() + 1e-12)
    master = np.clip(np.rint(master * 255), 0, 255).astype(np.uint8)
    frames = []
    oy = ox = 32
    for t in range(n_frames):
        frames.append(master[oy : oy + 4 * h : 4, ox : ox + 4 * w : 4].copy())
        sx, sy = steps[t % len(steps)]
        oy += sy
        ox += sx
    return frames


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

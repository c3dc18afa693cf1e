"""Pure-numpy implementations of the hot inner loops.

Same signatures as kernels_numba; selected via FRACFILT_BACKEND=numpy or
used as fallback when numba is unavailable.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

NAME = "numpy"


def xcorr2(x, k):
    """Valid cross-correlation of plane x with kernel k (no flip, no padding)."""
    kh, kw = k.shape
    win = sliding_window_view(x, (kh, kw))
    return np.tensordot(win, k, axes=([2, 3], [0, 1]))


def xcorr2_bank(x, ks):
    """Valid cross-correlation of one plane with a bank of kernels (n, kh, kw)."""
    kh, kw = ks.shape[1], ks.shape[2]
    win = sliding_window_view(x, (kh, kw))
    return np.tensordot(ks, win, axes=([1, 2], [2, 3]))


def xcorr2_stack_sum(xs, ks):
    """Per-channel valid cross-correlation of (n, h, w) with (n, kh, kw), summed over n."""
    kh, kw = ks.shape[1], ks.shape[2]
    win = sliding_window_view(xs, (kh, kw), axis=(1, 2))
    return np.einsum("nhwuv,nuv->hw", win, ks)


def xcorr2_with_shared(xs, p):
    """Per-channel valid cross-correlation of each xs[n] with one shared plane p."""
    ph, pw = p.shape
    win = sliding_window_view(xs, (ph, pw), axis=(1, 2))
    return np.einsum("nhwuv,uv->nhw", win, p)


def conv2_full(a, b):
    """Full 2-D convolution of two kernels: c[t] = sum_{u+v=t} a[u]*b[v]."""
    ah, aw = a.shape
    bh, bw = b.shape
    out = np.zeros((ah + bh - 1, aw + bw - 1))
    for u in range(bh):
        for v in range(bw):
            out[u : u + ah, v : v + aw] += a * b[u, v]
    return out


def conv2_full_stack(s, ks):
    """Full 2-D convolution of plane s with each kernel in (n, kh, kw)."""
    kh, kw = ks.shape[1], ks.shape[2]
    sp = np.pad(s, ((kh - 1, kh - 1), (kw - 1, kw - 1)))
    return xcorr2_bank(sp, ks[:, ::-1, ::-1])


def filter13_fixed(x, coef, shift, maxval):
    """Integer 13x13 residual filtering: rounding offset, arithmetic shift,
    center sample added back, clip to [0, maxval]. x and coef are int64."""
    win = sliding_window_view(x, (13, 13))
    acc = np.tensordot(win, coef, axes=([2, 3], [0, 1]))
    res = (acc + (1 << (shift - 1))) >> shift
    y = res + x[6 : 6 + res.shape[0], 6 : 6 + res.shape[1]]
    return np.clip(y, 0, maxval)


def tap_filter_cols(x, taps):
    """1-D integer tap filtering along columns: out[r,c] = sum_k taps[k]*x[r,c+k]."""
    n = taps.shape[0]
    wo = x.shape[1] - n + 1
    acc = np.zeros((x.shape[0], wo), dtype=np.int64)
    for k in range(n):
        acc += taps[k] * x[:, k : k + wo]
    return acc


def tap_filter_rows(x, taps):
    """1-D integer tap filtering along rows: out[r,c] = sum_k taps[k]*x[r+k,c]."""
    n = taps.shape[0]
    ho = x.shape[0] - n + 1
    acc = np.zeros((ho, x.shape[1]), dtype=np.int64)
    for k in range(n):
        acc += taps[k] * x[k : k + ho, :]
    return acc


def int_search(cur, ref, cy, cx, offs):
    """Full-search integer motion estimation over candidate offsets.

    cur: int64 block (h, w); ref: int64 plane; (cy, cx): block origin in ref
    coordinates; offs: (n, 2) int64 candidate (dy, dx) displacements, already
    ordered by the tie-break rule. Returns (index of best candidate, SAD).
    """
    h, w = cur.shape
    best_i = 0
    best_sad = np.int64(np.iinfo(np.int64).max)
    for i in range(offs.shape[0]):
        y0 = cy + offs[i, 0]
        x0 = cx + offs[i, 1]
        sad = np.abs(cur - ref[y0 : y0 + h, x0 : x0 + w]).sum()
        if sad < best_sad:
            best_sad = sad
            best_i = i
    return best_i, int(best_sad)

"""Numba-compiled implementations of the hot inner loops.

Mirrors kernels_numpy exactly; the dispatcher in kernels.py picks one of the
two at import time based on FRACFILT_BACKEND.
"""

import numpy as np
from numba import njit

NAME = "numba"

_OPTS = dict(cache=True, nogil=True)


@njit(**_OPTS)
def xcorr2(x, k):
    kh, kw = k.shape
    ho = x.shape[0] - kh + 1
    wo = x.shape[1] - kw + 1
    out = np.empty((ho, wo))
    for r in range(ho):
        for c in range(wo):
            acc = 0.0
            for u in range(kh):
                for v in range(kw):
                    acc += x[r + u, c + v] * k[u, v]
            out[r, c] = acc
    return out


@njit(**_OPTS)
def xcorr2_bank(x, ks):
    # im2col + BLAS matmul; an order of magnitude faster than scalar loops
    n, kh, kw = ks.shape
    ho = x.shape[0] - kh + 1
    wo = x.shape[1] - kw + 1
    cols = np.empty((kh * kw, ho * wo))
    for r in range(ho):
        for c in range(wo):
            idx = r * wo + c
            j = 0
            for u in range(kh):
                for v in range(kw):
                    cols[j, idx] = x[r + u, c + v]
                    j += 1
    kmat = np.ascontiguousarray(ks).reshape(n, kh * kw)
    return np.dot(kmat, cols).reshape(n, ho, wo)


@njit(**_OPTS)
def xcorr2_stack_sum(xs, ks):
    n, kh, kw = ks.shape
    ho = xs.shape[1] - kh + 1
    wo = xs.shape[2] - kw + 1
    out = np.zeros((ho, wo))
    for i in range(n):
        for r in range(ho):
            for c in range(wo):
                acc = 0.0
                for u in range(kh):
                    for v in range(kw):
                        acc += xs[i, r + u, c + v] * ks[i, u, v]
                out[r, c] += acc
    return out


@njit(**_OPTS)
def xcorr2_with_shared(xs, p):
    n = xs.shape[0]
    ph, pw = p.shape
    kh = xs.shape[1] - ph + 1
    kw = xs.shape[2] - pw + 1
    out = np.empty((n, kh, kw))
    for i in range(n):
        for u in range(kh):
            for v in range(kw):
                acc = 0.0
                for r in range(ph):
                    for c in range(pw):
                        acc += xs[i, u + r, v + c] * p[r, c]
                out[i, u, v] = acc
    return out


@njit(**_OPTS)
def conv2_full(a, b):
    ah, aw = a.shape
    bh, bw = b.shape
    out = np.zeros((ah + bh - 1, aw + bw - 1))
    for u in range(bh):
        for v in range(bw):
            for i in range(ah):
                for j in range(aw):
                    out[u + i, v + j] += a[i, j] * b[u, v]
    return out


@njit(**_OPTS)
def conv2_full_stack(s, ks):
    n, kh, kw = ks.shape
    sh, sw = s.shape
    out = np.zeros((n, sh + kh - 1, sw + kw - 1))
    for i in range(n):
        for u in range(kh):
            for v in range(kw):
                kv = ks[i, u, v]
                for r in range(sh):
                    for c in range(sw):
                        out[i, r + u, c + v] += s[r, c] * kv
    return out


@njit(**_OPTS)
def filter13_fixed(x, coef, shift, maxval):
    ho = x.shape[0] - 12
    wo = x.shape[1] - 12
    off = np.int64(1) << (shift - 1)
    out = np.empty((ho, wo), dtype=np.int64)
    for r in range(ho):
        for c in range(wo):
            acc = np.int64(0)
            for u in range(13):
                for v in range(13):
                    acc += x[r + u, c + v] * coef[u, v]
            y = ((acc + off) >> shift) + x[r + 6, c + 6]
            if y < 0:
                y = 0
            elif y > maxval:
                y = maxval
            out[r, c] = y
    return out


@njit(**_OPTS)
def tap_filter_cols(x, taps):
    n = taps.shape[0]
    h = x.shape[0]
    wo = x.shape[1] - n + 1
    out = np.empty((h, wo), dtype=np.int64)
    for r in range(h):
        for c in range(wo):
            acc = np.int64(0)
            for k in range(n):
                acc += taps[k] * x[r, c + k]
            out[r, c] = acc
    return out


@njit(**_OPTS)
def tap_filter_rows(x, taps):
    n = taps.shape[0]
    ho = x.shape[0] - n + 1
    w = x.shape[1]
    out = np.empty((ho, w), dtype=np.int64)
    for r in range(ho):
        for c in range(w):
            acc = np.int64(0)
            for k in range(n):
                acc += taps[k] * x[r + k, c]
            out[r, c] = acc
    return out


@njit(**_OPTS)
def int_search(cur, ref, cy, cx, offs):
    h, w = cur.shape
    best_i = 0
    best_sad = np.int64(np.iinfo(np.int64).max)
    for i in range(offs.shape[0]):
        y0 = cy + offs[i, 0]
        x0 = cx + offs[i, 1]
        sad = np.int64(0)
        for r in range(h):
            for c in range(w):
                d = cur[r, c] - ref[y0 + r, x0 + c]
                sad += d if d >= 0 else -d
            if sad >= best_sad:
                break
        if sad < best_sad:
            best_sad = sad
            best_i = i
    return best_i, int(best_sad)

"""Plane and kernel primitives: valid cross-correlation, full convolution,
center cropping.

Planes and kernels are plain 2-D numpy arrays, float64 on the training and
collapse path, integer on the codec path. All layer convolutions are valid
(no padding) stride-1 cross-correlations; kernel fusion uses true full
convolution so that stacking two valid cross-correlations equals a single
one with the fused kernel.
"""

import numpy as np

from . import kernels as K


def valid_xcorr(x: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Valid cross-correlation (no kernel flip): out[r,c] = sum x[r+u,c+v]*k[u,v].

    Output dims are (H-kh+1, W-kw+1).
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    k = np.ascontiguousarray(k, dtype=np.float64)
    if k.shape[0] > x.shape[0] or k.shape[1] > x.shape[1]:
        raise ValueError(
            f"kernel {k.shape} exceeds input {x.shape} in at least one axis"
        )
    return K.xcorr2(x, k)


def full_conv(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full 2-D convolution of two kernels, size (ah+bh-1, aw+bw-1).

    Satisfies valid_xcorr(valid_xcorr(x, a), b) == valid_xcorr(x, full_conv(a, b)).
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    return K.conv2_full(a, b)


def crop_center(x: np.ndarray, top: int, left: int, h: int, w: int) -> np.ndarray:
    """Return the h x w sub-plane of x at offset (top, left)."""
    if top < 0 or left < 0 or top + h > x.shape[0] or left + w > x.shape[1]:
        raise ValueError(
            f"crop ({top},{left})+({h},{w}) out of range for plane {x.shape}"
        )
    return x[top : top + h, left : left + w]

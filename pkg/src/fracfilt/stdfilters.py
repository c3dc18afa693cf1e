"""Standard separable quarter/half-pel luma interpolation.

Coefficients are the published HEVC/VVC luma constants (8-tap half-pel,
7-tap quarter-pel, 6-bit precision, DC gain 64). A sample at fractional
offset (dx/4, dy/4) below-right of integer position (r, c) is produced by
filtering horizontally at phase dx, then vertically at phase dy.

Bit-exact 8-bit pipeline:
  one stage only:   out = clip((sum(taps * ref) + 32) >> 6, 0, maxval)
  two stages:       horizontal sums are kept unshifted (the standard
                    14-bit-headroom normalization shift is bitdepth-8 = 0
                    at 8 bits), then out = clip((vsum + 2048) >> 12, 0, maxval)
Shifts are arithmetic (floor); with no intermediate rounding the two stage
orders produce identical integer sums.

Tap anchors relative to the integer sample: phase 1 spans offsets -3..+3,
phase 2 spans -3..+4, phase 3 spans -2..+4 (the mirror of phase 1).
"""

from dataclasses import dataclass

import numpy as np

from . import kernels as K

STD_SHIFT = 6

# phase -> (taps, first tap offset)
_PHASES = {
    1: ((-1, 4, -10, 58, 17, -5, 1), -3),
    2: ((-1, 4, -11, 40, 40, -11, 4, -1), -3),
    3: ((1, -5, 17, 58, -10, 4, -1), -2),
}


@dataclass(frozen=True)
class TapFilter:
    taps: tuple[int, ...]
    shift: int
    phase: int
    anchor: int  # offset of taps[0] from the integer sample


def std_coeffs(phase: int) -> TapFilter:
    """The standard luma filter for quarter-pel phase 1, 2 or 3."""
    if phase not in _PHASES:
        raise ValueError(f"phase {phase} has no filter (integer needs none)")
    taps, anchor = _PHASES[phase]
    return TapFilter(taps=taps, shift=STD_SHIFT, phase=phase, anchor=anchor)


def margins(frac) -> tuple[int, int, int, int]:
    """(top, left, bottom, right) reference margin needed beyond the block."""
    dx, dy = frac
    left = right = top = bottom = 0
    if dx:
        t = std_coeffs(dx)
        left, right = -t.anchor, t.anchor + len(t.taps) - 1
    if dy:
        t = std_coeffs(dy)
        top, bottom = -t.anchor, t.anchor + len(t.taps) - 1
    return top, left, bottom, right


def interp_std(
    ref: np.ndarray, top: int, left: int, h: int, w: int, frac, bitdepth: int = 8
) -> np.ndarray:
    """Interpolate the h x w block at (top, left) of ref at quarter-pel frac.

    frac = (dx, dy); (0, 0) returns the integer block unchanged. Raises when
    ref lacks the filter margins around the block.
    """
    dx, dy = frac
    if not (0 <= dx <= 3 and 0 <= dy <= 3):
        raise ValueError(f"invalid fractional position {frac}")
    mt, ml, mb, mr = margins(frac)
    if top - mt < 0 or left - ml < 0 or top + h + mb > ref.shape[0] or left + w + mr > ref.shape[1]:
        raise ValueError(
            f"block ({top},{left})+({h},{w}) frac {frac} lacks margin in ref {ref.shape}"
        )
    ri = np.ascontiguousarray(ref, dtype=np.int64)
    maxval = (1 << bitdepth) - 1

    if dx == 0 and dy == 0:
        return ri[top : top + h, left : left + w].copy()

    if dy == 0:
        tx = std_coeffs(dx)
        slab = ri[top : top + h, left + tx.anchor : left + tx.anchor + w + len(tx.taps) - 1]
        acc = K.tap_filter_cols(np.ascontiguousarray(slab), np.array(tx.taps, dtype=np.int64))
        return np.clip((acc + 32) >> 6, 0, maxval)

    if dx == 0:
        ty = std_coeffs(dy)
        slab = ri[top + ty.anchor : top + ty.anchor + h + len(ty.taps) - 1, left : left + w]
        acc = K.tap_filter_rows(np.ascontiguousarray(slab), np.array(ty.taps, dtype=np.int64))
        return np.clip((acc + 32) >> 6, 0, maxval)

    tx = std_coeffs(dx)
    ty = std_coeffs(dy)
    slab = ri[
        top + ty.anchor : top + ty.anchor + h + len(ty.taps) - 1,
        left + tx.anchor : left + tx.anchor + w + len(tx.taps) - 1,
    ]
    tmp = K.tap_filter_cols(np.ascontiguousarray(slab), np.array(tx.taps, dtype=np.int64))
    acc = K.tap_filter_rows(tmp, np.array(ty.taps, dtype=np.int64))
    return np.clip((acc + 2048) >> 12, 0, maxval)

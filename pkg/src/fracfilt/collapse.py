"""Collapse a trained model into a single 13x13 residual filter.

All three layers are linear, so the whole network is one valid
cross-correlation: M = sum_j full_conv(sum_i k2[j,i] * k1_i, k3_j).
Filtering any patch with M reproduces the network's residual output exactly,
which is what makes the learned interpolation cheap enough for codec use.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from .model import FRAC_POSITIONS, MARGIN, SUPPORT, ScratchModel, nearest_qp

DEFAULT_SHIFT = 6  # matches the 6-bit precision of the standard codec filters


@dataclass
class CollapsedFilter:
    """13x13 residual filter plus optional fixed-point form (coeffs ~ m * 2^shift)."""

    m: np.ndarray
    frac: tuple[int, int]
    qp: int
    fixed: np.ndarray | None = None
    shift: int | None = None

    def __post_init__(self):
        if self.m.shape != (SUPPORT, SUPPORT):
            raise ValueError(f"filter shape {self.m.shape}, expected (13, 13)")
        if self.frac not in FRAC_POSITIONS:
            raise ValueError(f"invalid fractional position {self.frac}")


@dataclass
class FilterBank:
    """Collapsed filters keyed by (dx, dy, qp)."""

    filters: dict[tuple[int, int, int], CollapsedFilter] = field(default_factory=dict)

    def add(self, f: CollapsedFilter) -> None:
        self.filters[(f.frac[0], f.frac[1], f.qp)] = f

    def qps_for(self, frac) -> list[int]:
        return sorted(q for (dx, dy, q) in self.filters if (dx, dy) == tuple(frac))

    def select(self, qp: int, frac) -> CollapsedFilter:
        frac = tuple(frac)
        qps = self.qps_for(frac)
        if not qps:
            raise KeyError(f"no filters for fractional position {frac}")
        return self.filters[(frac[0], frac[1], nearest_qp(qps, qp))]


def collapse(model: ScratchModel) -> CollapsedFilter:
    """Fuse the three kernel banks into the equivalent 13x13 filter."""
    mixed = np.tensordot(model.k2, model.k1, axes=(1, 0))  # (32, 9, 9)
    m = np.zeros((SUPPORT, SUPPORT))
    for j in range(mixed.shape[0]):
        m += K.conv2_full(np.ascontiguousarray(mixed[j]), model.k3[j])
    return CollapsedFilter(m=m, frac=model.frac, qp=model.qp)


def quantize_filter(f: CollapsedFilter, shift: int = DEFAULT_SHIFT) -> CollapsedFilter:
    """Attach fixed-point coefficients round_half_away_from_zero(m * 2^shift)."""
    if not 4 <= shift <= 14:
        raise ValueError(f"shift {shift} outside [4, 14]")
    scaled = f.m * (1 << shift)
    fixed = (np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)).astype(np.int64)
    return CollapsedFilter(m=f.m.copy(), frac=f.frac, qp=f.qp, fixed=fixed, shift=shift)


def apply_collapsed(
    f: CollapsedFilter, x: np.ndarray, mode: str = "float", bitdepth: int = 8
) -> np.ndarray:
    """Filter reference patch x with the collapsed filter.

    float mode: residual filtering in float64 plus the co-located input.
    fixed mode: integer pipeline, accumulate fixed coefficients in 64-bit,
    add the rounding offset 2^(shift-1), arithmetic shift right, add the
    integer center sample, clip to [0, 2^bitdepth - 1].
    """
    if x.shape[0] < SUPPORT or x.shape[1] < SUPPORT:
        raise ValueError(f"input {x.shape} smaller than {SUPPORT}x{SUPPORT}")
    if mode == "float":
        xf = np.ascontiguousarray(x, dtype=np.float64)
        res = K.xcorr2(xf, np.ascontiguousarray(f.m))
        return res + xf[MARGIN : MARGIN + res.shape[0], MARGIN : MARGIN + res.shape[1]]
    if mode == "fixed":
        if f.fixed is None:
            raise ValueError("filter has no fixed-point coefficients; quantize first")
        xi = np.ascontiguousarray(x, dtype=np.int64)
        return K.filter13_fixed(
            xi,
            np.ascontiguousarray(f.fixed, dtype=np.int64),
            f.shift,
            (1 << bitdepth) - 1,
        )
    raise ValueError(f"unknown mode {mode!r}")


def filter_csv_text(f: CollapsedFilter) -> str:
    rows = [",".join(f"{v:.17g}" for v in row) for row in f.m]
    return "\n".join(rows) + "\n"


def parse_filter_csv(text: str) -> np.ndarray:
    m = np.array(
        [[float(v) for v in line.split(",")] for line in text.strip().splitlines()]
    )
    if m.shape != (SUPPORT, SUPPORT):
        raise ValueError(f"CSV holds {m.shape}, expected (13, 13)")
    return m


def export_heatmap(f: CollapsedFilter, stem) -> tuple[str, str]:
    """Write <stem>.csv (coefficients) and <stem>.pgm (min-max normalized
    grayscale); returns the two paths. A constant filter has no range and is
    emitted as mid-gray with a warning."""
    csv_path = f"{stem}.csv"
    pgm_path = f"{stem}.pgm"
    with open(csv_path, "w") as fh:
        fh.write(filter_csv_text(f))
    lo, hi = f.m.min(), f.m.max()
    if hi > lo:
        img = np.rint((f.m - lo) / (hi - lo) * 255.0).astype(np.uint8)
    else:
        warnings.warn(f"filter for {f.frac} qp {f.qp} has degenerate range; mid-gray")
        img = np.full((SUPPORT, SUPPORT), 128, dtype=np.uint8)
    with open(pgm_path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (SUPPORT, SUPPORT))
        fh.write(img.tobytes())
    return csv_path, pgm_path

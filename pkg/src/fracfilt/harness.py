"""Self-contained motion-compensation harness.

Stands in for a real encoder experiment: frames are degraded by a DCT
quantization surrogate, blocks get full-search integer + quarter-pel motion
vectors, and fractional blocks choose per block between the standard
separable filters and the learned 13x13 filters (one signalled flag per
block, cost = SAD + lambda * bits; the flag costs the same either way so it
cancels with the default lambda = 0).
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels as K
from .collapse import FilterBank, apply_collapsed
from .metrics import psnr
from .model import MARGIN
from .stdfilters import interp_std
from .training import TrainingRecord

# padding past the search range: 6 samples for the 13x13 filter patch plus one
# for the fractional anchors one pel up/left of the best integer position
PAD_MARGIN = 7


@dataclass(frozen=True)
class MotionVector:
    ix: int
    iy: int
    frac: tuple[int, int]  # (dx, dy) quarter-pel phases


@dataclass
class BlockDecision:
    top: int
    left: int
    h: int
    w: int
    mv: MotionVector
    choice: str  # "standard" | "learned"
    cost_std: float
    cost_nn: float


@dataclass
class SimConfig:
    qps: tuple[int, ...] = (22, 27, 32, 37)
    block_size: int = 16
    search_range: int = 8
    lam: float = 0.0


# ---------------------------------------------------------------------------
# compression surrogate

_DCT8 = None


def _dct8_matrix() -> np.ndarray:
    global _DCT8
    if _DCT8 is None:
        n = 8
        k = np.arange(n)[:, None]
        m = np.arange(n)[None, :]
        d = np.cos(np.pi * (2 * m + 1) * k / (2 * n)) * np.sqrt(2.0 / n)
        d[0] /= np.sqrt(2.0)
        _DCT8 = d
    return _DCT8


def qstep(qp: int) -> float:
    return 2.0 ** ((qp - 4) / 6.0)


def compress_surrogate(frame: np.ndarray, qp: int, bitdepth: int = 8) -> np.ndarray:
    """8x8 DCT-II, uniform quantization at Qstep = 2^((qp-4)/6), inverse, clip.

    Frames whose dimensions are not multiples of 8 are edge-padded for the
    transform and cropped back.
    """
    h, w = frame.shape
    ph = (-h) % 8
    pw = (-w) % 8
    x = np.asarray(frame, dtype=np.float64)
    if ph or pw:
        x = np.pad(x, ((0, ph), (0, pw)), mode="edge")
    d = _dct8_matrix()
    hb, wb = x.shape[0] // 8, x.shape[1] // 8
    blocks = x.reshape(hb, 8, wb, 8).transpose(0, 2, 1, 3)
    coefs = d @ blocks @ d.T
    step = qstep(qp)
    coefs = np.rint(coefs / step) * step
    rec = d.T @ coefs @ d
    out = rec.transpose(0, 2, 1, 3).reshape(hb * 8, wb * 8)[:h, :w]
    maxval = (1 << bitdepth) - 1
    return np.clip(np.rint(out), 0, maxval).astype(np.uint8)


# ---------------------------------------------------------------------------
# motion search

@lru_cache(maxsize=8)
def _search_offsets(search_range: int) -> np.ndarray:
    offs = [
        (dy, dx)
        for dy in range(-search_range, search_range + 1)
        for dx in range(-search_range, search_range + 1)
    ]
    offs.sort(key=lambda t: (abs(t[0]) + abs(t[1]), t[0], t[1]))
    return np.array(offs, dtype=np.int64)


def pad_reference(ref: np.ndarray, search_range: int) -> tuple[np.ndarray, int]:
    """Border-replicated reference covering any candidate MV plus filter margins."""
    pad = search_range + PAD_MARGIN
    return np.pad(np.asarray(ref), pad, mode="edge"), pad


def _search_block(cur_i64, padded_i64, padded_u8, top, left, pad, search_range):
    """Integer full search, then all 15 quarter-pel phases anchored at the
    four integer positions {best-1, best}^2 (the quarter-pel grid within one
    pel of the best integer candidate). Ties prefer the integer result, then
    smaller |anchor|, anchor iy, ix, then phase (dy, dx)."""
    h, w = cur_i64.shape
    offs = _search_offsets(search_range)
    cy, cx = top + pad, left + pad
    best_i, best_sad = K.int_search(cur_i64, padded_i64, cy, cx, offs)
    iy, ix = int(offs[best_i, 0]), int(offs[best_i, 1])
    best = MotionVector(ix=ix, iy=iy, frac=(0, 0))
    cands = sorted(
        (abs(ay) + abs(ax), ay, ax, dy, dx)
        for ay in (iy - 1, iy)
        for ax in (ix - 1, ix)
        for dy in range(4)
        for dx in range(4)
        if (dx, dy) != (0, 0)
    )
    for _, ay, ax, dy, dx in cands:
        pred = interp_std(padded_u8, cy + ay, cx + ax, h, w, (dx, dy))
        sad = int(np.abs(cur_i64 - pred).sum())
        if sad < best_sad:
            best_sad = sad
            best = MotionVector(ix=ax, iy=ay, frac=(dx, dy))
    return best, best_sad


def motion_search(
    cur: np.ndarray, ref: np.ndarray, top: int, left: int, search_range: int = 8
) -> tuple[MotionVector, int]:
    """Best (MV, SAD) for the block of cur at (top, left) searched in ref."""
    h, w = cur.shape
    if top < 0 or left < 0 or top + h > ref.shape[0] or left + w > ref.shape[1]:
        raise ValueError(f"block ({top},{left})+({h},{w}) outside reference {ref.shape}")
    padded, pad = pad_reference(ref, search_range)
    return _search_block(
        np.ascontiguousarray(cur, dtype=np.int64),
        np.ascontiguousarray(padded, dtype=np.int64),
        padded,
        top,
        left,
        pad,
        search_range,
    )


# ---------------------------------------------------------------------------
# switchable filter selection

def _nn_patch(padded, pt, pl, h, w):
    return padded[pt - MARGIN : pt + h + MARGIN, pl - MARGIN : pl + w + MARGIN]


def select_filter(
    cur: np.ndarray,
    ref: np.ndarray,
    top: int,
    left: int,
    mv: MotionVector,
    filters: FilterBank,
    qp: int,
    lam: float = 0.0,
    search_range: int = 8,
) -> BlockDecision:
    """Per-block choice between the standard and the learned filter.

    Both options signal one flag bit, so cost = SAD + lam * 1 on both sides
    and the flag cancels in the comparison; ties go to the standard filter.
    """
    if mv.frac == (0, 0):
        raise ValueError("integer blocks bypass filter selection")
    h, w = cur.shape
    padded, pad = pad_reference(ref, search_range)
    pt, pl = top + pad + mv.iy, left + pad + mv.ix
    cur_i = np.asarray(cur, dtype=np.int64)
    pred_std = interp_std(padded, pt, pl, h, w, mv.frac)
    f = filters.select(qp, mv.frac)
    pred_nn = apply_collapsed(f, _nn_patch(padded, pt, pl, h, w), mode="fixed")
    cost_std = float(np.abs(cur_i - pred_std).sum()) + lam
    cost_nn = float(np.abs(cur_i - pred_nn).sum()) + lam
    choice = "learned" if cost_nn < cost_std else "standard"
    return BlockDecision(top, left, h, w, mv, choice, cost_std, cost_nn)


# ---------------------------------------------------------------------------
# simulation

@dataclass
class QpStats:
    frames: int = 0
    blocks: int = 0
    fractional_blocks: int = 0
    learned_chosen: int = 0
    uncovered_blocks: int = 0  # fractional, but no filter trained for the position
    flag_bits: int = 0
    usage: dict[str, int] = field(default_factory=dict)
    psnr_frames: dict[str, list[float]] = field(
        default_factory=lambda: {"std": [], "nn": [], "switch": []}
    )
    sad_frames: dict[str, list[int]] = field(
        default_factory=lambda: {"std": [], "nn": [], "switch": []}
    )

    @property
    def hit_ratio(self):
        if self.fractional_blocks == 0:
            return None
        return self.learned_chosen / self.fractional_blocks


def _json_float(v: float):
    return v if math.isfinite(v) else "inf"


def _qp_report(s: QpStats) -> dict:
    mean = lambda xs: _json_float(sum(xs) / len(xs)) if xs else None
    return {
        "frames": s.frames,
        "blocks": s.blocks,
        "fractional_blocks": s.fractional_blocks,
        "learned_chosen": s.learned_chosen,
        "uncovered_blocks": s.uncovered_blocks,
        "hit_ratio": s.hit_ratio,
        "flag_bits": s.flag_bits,
        "usage": dict(sorted(s.usage.items())),
        "mean_psnr": {k: mean(v) for k, v in sorted(s.psnr_frames.items())},
        "frame_sad": {k: v for k, v in sorted(s.sad_frames.items())},
    }


def _block_grid(h, w, bs):
    for top in range(0, h, bs):
        for left in range(0, w, bs):
            yield top, left, min(bs, h - top), min(bs, w - left)


def simulate(frames, filters: FilterBank, cfg: SimConfig) -> dict:
    """Run the switchable-filter experiment; returns the report as a dict."""
    frames = [np.asarray(f) for f in frames]
    if len(frames) < 2:
        raise ValueError(f"need at least 2 frames, got {len(frames)}")
    fh, fw = frames[0].shape
    report: dict = {
        "config": {
            "qps": list(cfg.qps),
            "block_size": cfg.block_size,
            "search_range": cfg.search_range,
            "lambda": cfg.lam,
            "frames": len(frames),
            "width": fw,
            "height": fh,
        },
        "per_qp": {},
    }
    for qp in cfg.qps:
        stats = QpStats()
        for t in range(1, len(frames)):
            cur = frames[t]
            ref = compress_surrogate(frames[t - 1], qp)
            padded, pad = pad_reference(ref, cfg.search_range)
            padded_i64 = np.ascontiguousarray(padded, dtype=np.int64)
            preds = {k: np.zeros_like(cur) for k in ("std", "nn", "switch")}
            for top, left, h, w in _block_grid(fh, fw, cfg.block_size):
                cur_blk = np.ascontiguousarray(cur[top : top + h, left : left + w], dtype=np.int64)
                mv, _ = _search_block(
                    cur_blk, padded_i64, padded, top, left, pad, cfg.search_range
                )
                stats.blocks += 1
                pt, pl = top + pad + mv.iy, left + pad + mv.ix
                if mv.frac == (0, 0):
                    blk = padded[pt : pt + h, pl : pl + w]
                    for k in preds:
                        preds[k][top : top + h, left : left + w] = blk
                    continue
                pred_std = interp_std(padded, pt, pl, h, w, mv.frac)
                try:
                    f = filters.select(qp, mv.frac)
                except KeyError:
                    # no learned option for this position: nothing to switch,
                    # so the block does not enter the hit-ratio accounting
                    stats.uncovered_blocks += 1
                    for k in preds:
                        preds[k][top : top + h, left : left + w] = pred_std
                    continue
                stats.fractional_blocks += 1
                stats.flag_bits += 1
                key = f"{mv.frac[0]},{mv.frac[1]}"
                stats.usage[key] = stats.usage.get(key, 0) + 1
                pred_nn = apply_collapsed(f, _nn_patch(padded, pt, pl, h, w), mode="fixed")
                cost_std = float(np.abs(cur_blk - pred_std).sum()) + cfg.lam
                cost_nn = float(np.abs(cur_blk - pred_nn).sum()) + cfg.lam
                chosen = pred_nn if cost_nn < cost_std else pred_std
                if cost_nn < cost_std:
                    stats.learned_chosen += 1
                preds["std"][top : top + h, left : left + w] = pred_std
                preds["nn"][top : top + h, left : left + w] = pred_nn
                preds["switch"][top : top + h, left : left + w] = chosen
            stats.frames += 1
            curi = cur.astype(np.int64)
            for k in preds:
                stats.psnr_frames[k].append(psnr(cur, preds[k]))
                stats.sad_frames[k].append(int(np.abs(curi - preds[k].astype(np.int64)).sum()))
        report["per_qp"][str(qp)] = _qp_report(stats)
    return report


# ---------------------------------------------------------------------------
# dataset extraction

def build_dataset(
    frames, qp: int, cfg: SimConfig | None = None
) -> tuple[list[TrainingRecord], int]:
    """Extract (reference patch, original block) training records.

    Fractional-MV blocks emit a record whose input is the (H+12) x (W+12)
    patch of the compressed reference at the integer part of the MV; blocks
    whose patch would leave the frame are skipped (replicated margins would
    pollute training). Returns (records, skipped_count).
    """
    cfg = cfg or SimConfig()
    if cfg.block_size > 32:
        raise ValueError("training blocks are limited to 32x32")
    frames = [np.asarray(f) for f in frames]
    if len(frames) < 2:
        raise ValueError(f"need at least 2 frames, got {len(frames)}")
    fh, fw = frames[0].shape
    records: list[TrainingRecord] = []
    skipped = 0
    for t in range(1, len(frames)):
        cur = frames[t]
        ref = compress_surrogate(frames[t - 1], qp)
        padded, pad = pad_reference(ref, cfg.search_range)
        padded_i64 = np.ascontiguousarray(padded, dtype=np.int64)
        for top, left, h, w in _block_grid(fh, fw, cfg.block_size):
            cur_blk = np.ascontiguousarray(cur[top : top + h, left : left + w], dtype=np.int64)
            mv, _ = _search_block(
                cur_blk, padded_i64, padded, top, left, pad, cfg.search_range
            )
            if mv.frac == (0, 0):
                continue
            rt, rl = top + mv.iy, left + mv.ix
            if rt - MARGIN < 0 or rl - MARGIN < 0 or rt + h + MARGIN > fh or rl + w + MARGIN > fw:
                skipped += 1
                continue
            records.append(
                TrainingRecord(
                    frac=mv.frac,
                    qp=qp,
                    input=ref[rt - MARGIN : rt + h + MARGIN, rl - MARGIN : rl + w + MARGIN].copy(),
                    target=cur[top : top + h, left : left + w].copy(),
                )
            )
    return records, skipped

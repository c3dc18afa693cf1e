"""Raw video ingestion and artifact serialization.

All binary containers are little-endian and start with a 4-byte magic plus a
version byte.

Model bank (magic FFMB, version 1):
    u32 model count, then per model:
    u8 tag length, ascii architecture tag ("scratchcnn"),
    u8 dx, u8 dy, u8 qp,
    64*81 f8 k1 (kernel-major, each 9x9 row-major),
    32*64 f8 k2 (row-major), 32*25 f8 k3 (kernel-major, row-major).

Filter set (magic FFFS, version 1):
    u32 filter count, then per filter:
    u8 dx, u8 dy, u8 qp, 169 f8 coefficients (row-major),
    u8 has_fixed; if 1: u8 shift, 169 i4 fixed coefficients.

Dataset (magic FFDS, version 1):
    u32 record count, then per record:
    u8 dx, u8 dy, u8 qp, u16 height H, u16 width W,
    (H+12)*(W+12) u8 input samples, H*W u8 target samples (row-major).

Raw video input is 8-bit YUV 4:2:0; only the luma plane is read.
"""

import json
import struct
from dataclasses import dataclass

import numpy as np

from .collapse import CollapsedFilter, FilterBank
from .model import MARGIN, ModelBank, ScratchModel
from .training import TrainingRecord

BANK_MAGIC = b"FFMB"
FILTERS_MAGIC = b"FFFS"
DATASET_MAGIC = b"FFDS"
VERSION = 1
ARCH_TAG = b"scratchcnn"


def _read_header(fh, magic, what):
    head = fh.read(5)
    if len(head) < 5 or head[:4] != magic:
        raise ValueError(f"not a {what} file (bad magic)")
    if head[4] != VERSION:
        raise ValueError(f"unsupported {what} version {head[4]}")
    return struct.unpack("<I", fh.read(4))[0]


def _read_exact(fh, n):
    buf = fh.read(n)
    if len(buf) != n:
        raise ValueError(f"truncated file: wanted {n} bytes, got {len(buf)}")
    return buf


def _read_f8(fh, count, shape):
    return np.frombuffer(_read_exact(fh, count * 8), dtype="<f8").reshape(shape).copy()


# ---------------------------------------------------------------------------
# model bank

def write_bank(path, bank: ModelBank) -> None:
    with open(path, "wb") as fh:
        fh.write(BANK_MAGIC + bytes([VERSION]))
        keys = sorted(bank.models.keys(), key=lambda k: (k[2], k[1], k[0]))
        fh.write(struct.pack("<I", len(keys)))
        for key in keys:
            m = bank.models[key]
            fh.write(bytes([len(ARCH_TAG)]) + ARCH_TAG)
            fh.write(struct.pack("<BBB", m.frac[0], m.frac[1], m.qp))
            fh.write(np.ascontiguousarray(m.k1, "<f8").tobytes())
            fh.write(np.ascontiguousarray(m.k2, "<f8").tobytes())
            fh.write(np.ascontiguousarray(m.k3, "<f8").tobytes())


def read_bank(path) -> ModelBank:
    bank = ModelBank()
    with open(path, "rb") as fh:
        count = _read_header(fh, BANK_MAGIC, "model bank")
        for _ in range(count):
            taglen = _read_exact(fh, 1)[0]
            tag = _read_exact(fh, taglen)
            if tag != ARCH_TAG:
                raise ValueError(f"unknown architecture tag {tag!r}")
            dx, dy, qp = struct.unpack("<BBB", _read_exact(fh, 3))
            k1 = _read_f8(fh, 64 * 81, (64, 9, 9))
            k2 = _read_f8(fh, 32 * 64, (32, 64))
            k3 = _read_f8(fh, 32 * 25, (32, 5, 5))
            bank.add(ScratchModel(k1=k1, k2=k2, k3=k3, frac=(dx, dy), qp=qp))
    return bank


# ---------------------------------------------------------------------------
# filter set

def write_filters(path, filters: FilterBank) -> None:
    with open(path, "wb") as fh:
        fh.write(FILTERS_MAGIC + bytes([VERSION]))
        keys = sorted(filters.filters.keys(), key=lambda k: (k[2], k[1], k[0]))
        fh.write(struct.pack("<I", len(keys)))
        for key in keys:
            f = filters.filters[key]
            fh.write(struct.pack("<BBB", f.frac[0], f.frac[1], f.qp))
            fh.write(np.ascontiguousarray(f.m, "<f8").tobytes())
            if f.fixed is not None:
                fh.write(bytes([1, f.shift]))
                fh.write(np.ascontiguousarray(f.fixed, "<i4").tobytes())
            else:
                fh.write(bytes([0]))


def read_filters(path) -> FilterBank:
    bank = FilterBank()
    with open(path, "rb") as fh:
        count = _read_header(fh, FILTERS_MAGIC, "filter set")
        for _ in range(count):
            dx, dy, qp = struct.unpack("<BBB", _read_exact(fh, 3))
            m = _read_f8(fh, 169, (13, 13))
            fixed = shift = None
            if _read_exact(fh, 1)[0]:
                shift = _read_exact(fh, 1)[0]
                fixed = (
                    np.frombuffer(_read_exact(fh, 169 * 4), dtype="<i4")
                    .reshape(13, 13)
                    .astype(np.int64)
                )
            bank.add(
                CollapsedFilter(m=m, frac=(dx, dy), qp=qp, fixed=fixed, shift=shift)
            )
    return bank


# ---------------------------------------------------------------------------
# dataset

def write_dataset(path, records) -> None:
    with open(path, "wb") as fh:
        fh.write(DATASET_MAGIC + bytes([VERSION]))
        fh.write(struct.pack("<I", len(records)))
        for r in records:
            if not (np.issubdtype(r.input.dtype, np.integer) and np.issubdtype(r.target.dtype, np.integer)):
                raise ValueError("dataset containers hold 8-bit records; got float planes")
            h, w = r.target.shape
            fh.write(struct.pack("<BBBHH", r.frac[0], r.frac[1], r.qp, h, w))
            fh.write(np.ascontiguousarray(r.input, dtype=np.uint8).tobytes())
            fh.write(np.ascontiguousarray(r.target, dtype=np.uint8).tobytes())


def read_dataset(path) -> list[TrainingRecord]:
    records = []
    with open(path, "rb") as fh:
        count = _read_header(fh, DATASET_MAGIC, "dataset")
        for _ in range(count):
            dx, dy, qp, h, w = struct.unpack("<BBBHH", _read_exact(fh, 7))
            ih, iw = h + 2 * MARGIN, w + 2 * MARGIN
            inp = np.frombuffer(_read_exact(fh, ih * iw), dtype=np.uint8).reshape(ih, iw).copy()
            tgt = np.frombuffer(_read_exact(fh, h * w), dtype=np.uint8).reshape(h, w).copy()
            records.append(TrainingRecord(frac=(dx, dy), qp=qp, input=inp, target=tgt))
    return records


# ---------------------------------------------------------------------------
# raw YUV 4:2:0

@dataclass
class YuvSequence:
    path: str
    width: int
    height: int
    bitdepth: int = 8
    frames: int = 0

    def __post_init__(self):
        import os

        luma = self.width * self.height
        frame_bytes = luma + luma // 2
        size = os.path.getsize(self.path)
        if size % frame_bytes != 0:
            raise ValueError(
                f"{self.path}: size {size} is not a multiple of the "
                f"{self.width}x{self.height} 4:2:0 frame size {frame_bytes}"
            )
        self.frames = size // frame_bytes


def read_luma(seq: YuvSequence, frame_index: int) -> np.ndarray:
    """The luma plane of one frame; chroma is skipped."""
    if not 0 <= frame_index < seq.frames:
        raise IndexError(f"frame {frame_index} out of range [0, {seq.frames})")
    luma = seq.width * seq.height
    frame_bytes = luma + luma // 2
    with open(seq.path, "rb") as fh:
        fh.seek(frame_index * frame_bytes)
        buf = _read_exact(fh, luma)
    return np.frombuffer(buf, dtype=np.uint8).reshape(seq.height, seq.width).copy()


def read_all_luma(seq: YuvSequence) -> list[np.ndarray]:
    return [read_luma(seq, i) for i in range(seq.frames)]


def write_yuv(path, frames, chroma_value: int = 128) -> None:
    """Write 8-bit 4:2:0 frames (luma planes given, chroma constant)."""
    with open(path, "wb") as fh:
        for f in frames:
            f = np.asarray(f, dtype=np.uint8)
            h, w = f.shape
            fh.write(f.tobytes())
            fh.write(bytes([chroma_value]) * (h * w // 2))


# ---------------------------------------------------------------------------
# reports and RD curves

def write_report(path, report: dict) -> None:
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_rd_csv(path) -> list[tuple[float, float]]:
    """RD points from a CSV with columns rate,psnr (header line optional)."""
    points = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                rate, quality = float(parts[0]), float(parts[1])
            except (ValueError, IndexError):
                if not points:
                    continue  # header
                raise ValueError(f"{path}: malformed RD line {line!r}")
            points.append((rate, quality))
    if not points:
        raise ValueError(f"{path}: no RD points found")
    return points

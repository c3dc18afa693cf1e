"""Distortion and rate-quality metrics: PSNR and Bjontegaard delta-rate."""

import math

import numpy as np


def mse(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    d = np.asarray(a, float) - np.asarray(b, float)
    return float(np.mean(d * d))


def psnr(a: np.ndarray, b: np.ndarray, bitdepth: int = 8) -> float:
    """10*log10(MAX^2 / MSE); +inf for identical planes."""
    e = mse(a, b)
    if e == 0.0:
        return math.inf
    peak = (1 << bitdepth) - 1
    return 10.0 * math.log10(peak * peak / e)


def _check_points(points, name):
    pts = [(float(r), float(p)) for r, p in points]
    if len(pts) < 4:
        raise ValueError(f"{name} needs at least 4 RD points, got {len(pts)}")
    if any(r <= 0 for r, _ in pts):
        raise ValueError(f"{name} rates must be positive")
    psnrs = [p for _, p in pts]
    if len(set(psnrs)) != len(psnrs):
        raise ValueError(f"{name} PSNR values must be distinct")
    pts.sort(key=lambda t: t[1])
    return np.array([r for r, _ in pts]), np.array([p for _, p in pts])


def bd_rate(anchor, test) -> float:
    """Bjontegaard delta-rate in percent (negative = bitrate saving).

    Cubic fit of log10(rate) over PSNR for each curve, integrated over the
    overlapping PSNR interval; 100*(10^mean_diff - 1).
    """
    ra, pa = _check_points(anchor, "anchor")
    rt, pt = _check_points(test, "test")
    lo = max(pa.min(), pt.min())
    hi = min(pa.max(), pt.max())
    if hi <= lo:
        raise ValueError(f"no PSNR overlap: anchor [{pa.min()}, {pa.max()}], test [{pt.min()}, {pt.max()}]")
    ca = np.polyfit(pa, np.log10(ra), 3)
    ct = np.polyfit(pt, np.log10(rt), 3)
    if not (np.all(np.isfinite(ca)) and np.all(np.isfinite(ct))):
        raise ValueError("singular polynomial fit")
    ia = np.polyint(ca)
    it = np.polyint(ct)
    mean_a = (np.polyval(ia, hi) - np.polyval(ia, lo)) / (hi - lo)
    mean_t = (np.polyval(it, hi) - np.polyval(it, lo)) / (hi - lo)
    return float(100.0 * (10.0 ** (mean_t - mean_a) - 1.0))

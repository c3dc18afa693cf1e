import math

import numpy as np
import pytest

from fracfilt.metrics import bd_rate, mse, psnr


def cheb_bd_rate_oracle(anchor, test):
    """Independent reimplementation: Chebyshev-basis fit plus numeric quadrature."""
    from numpy.polynomial import chebyshev as C

    ra = np.array([r for r, _ in anchor])
    pa = np.array([p for _, p in anchor])
    rt = np.array([r for r, _ in test])
    pt = np.array([p for _, p in test])
    lo = max(pa.min(), pt.min())
    hi = min(pa.max(), pt.max())
    fa = C.Chebyshev.fit(pa, np.log10(ra), 3)
    ft = C.Chebyshev.fit(pt, np.log10(rt), 3)
    xs = np.linspace(lo, hi, 20001)
    diff = np.trapezoid(ft(xs) - fa(xs), xs) / (hi - lo)
    return 100.0 * (10.0**diff - 1.0)


def rd_curve(rng, n=4, base_rate=1000.0, base_psnr=30.0):
    rates = base_rate * np.cumprod(1.5 + 0.2 * rng.random(n))
    psnrs = base_psnr + np.cumsum(1.0 + rng.random(n))
    return list(zip(rates, psnrs))


class TestPsnr:
    def test_identical_planes_infinite(self, rng):
        x = rng.integers(0, 256, (8, 8)).astype(np.uint8)
        assert psnr(x, x.copy()) == math.inf

    def test_unit_difference_closed_form(self):
        a = np.zeros((8, 8), dtype=np.uint8)
        b = np.ones((8, 8), dtype=np.uint8)
        assert abs(psnr(a, b) - 10 * math.log10(255**2)) <= 1e-12

    def test_matches_loop_oracle(self, rng):
        a = rng.integers(0, 256, (6, 7)).astype(np.uint8)
        b = rng.integers(0, 256, (6, 7)).astype(np.uint8)
        acc = 0.0
        for r in range(6):
            for c in range(7):
                acc += (float(a[r, c]) - float(b[r, c])) ** 2
        expect = 10 * math.log10(255**2 / (acc / 42))
        assert abs(psnr(a, b) - expect) <= 1e-12

    def test_dimension_mismatch_raises(self, rng):
        with pytest.raises(ValueError):
            mse(np.zeros((4, 4)), np.zeros((4, 5)))


class TestBdRate:
    def test_identical_curves_exact_zero(self, rng):
        curve = rd_curve(rng)
        assert bd_rate(curve, list(curve)) == 0.0

    def test_uniform_rate_scaling(self, rng):
        curve = rd_curve(rng)
        scaled = [(0.9 * r, p) for r, p in curve]
        assert abs(bd_rate(curve, scaled) - (-10.0)) <= 1e-9

    def test_matches_dual_implementation(self, rng):
        for _ in range(5):
            anchor = rd_curve(rng)
            test = rd_curve(rng, base_rate=900.0, base_psnr=30.5)
            got = bd_rate(anchor, test)
            oracle = cheb_bd_rate_oracle(anchor, test)
            assert abs(got - oracle) <= 0.01

    def test_antisymmetry(self, rng):
        a = rd_curve(rng)
        b = rd_curve(rng, base_rate=800.0, base_psnr=30.2)
        ab = bd_rate(a, b)
        ba = bd_rate(b, a)
        assert abs(ab - (-ba / (1 + ba / 100.0))) <= 1e-9

    def test_unit_invariance(self, rng):
        a = rd_curve(rng)
        b = rd_curve(rng, base_rate=1200.0)
        base = bd_rate(a, b)
        for c in (1e-3, 8.0, 1e6):
            scaled = bd_rate([(c * r, p) for r, p in a], [(c * r, p) for r, p in b])
            assert abs(scaled - base) <= 1e-9

    def test_too_few_points_raises(self, rng):
        good = rd_curve(rng)
        with pytest.raises(ValueError):
            bd_rate(good[:3], good)

    def test_no_overlap_raises(self, rng):
        a = rd_curve(rng, base_psnr=30.0)
        b = [(r, p + 100.0) for r, p in rd_curve(rng)]
        with pytest.raises(ValueError):
            bd_rate(a, b)

    def test_duplicate_psnr_raises(self):
        pts = [(100.0, 30.0), (200.0, 30.0), (300.0, 32.0), (400.0, 33.0)]
        with pytest.raises(ValueError):
            bd_rate(pts, pts)

    def test_nonpositive_rate_raises(self):
        pts = [(-1.0, 30.0), (200.0, 31.0), (300.0, 32.0), (400.0, 33.0)]
        with pytest.raises(ValueError):
            bd_rate(pts, pts)

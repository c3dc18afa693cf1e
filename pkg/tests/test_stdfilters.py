import numpy as np
import pytest

from fracfilt.stdfilters import interp_std, margins, std_coeffs


def _taps(phase):
    t = std_coeffs(phase)
    return list(t.taps), t.anchor


def interp_oracle(ref, top, left, h, w, frac):
    """Direct per-sample loops implementing the documented pipeline:
    horizontal unshifted, vertical, one final rounding (offset 32 >> 6 for a
    single stage, 2048 >> 12 for two)."""
    dx, dy = frac
    ref = np.asarray(ref).astype(int)
    out = np.zeros((h, w), dtype=int)
    if dx == 0 and dy == 0:
        return ref[top : top + h, left : left + w].copy()
    for r in range(h):
        for c in range(w):
            if dy == 0:
                tx, ax = _taps(dx)
                acc = sum(tx[k] * ref[top + r, left + c + ax + k] for k in range(len(tx)))
                out[r, c] = min(max((acc + 32) >> 6, 0), 255)
            elif dx == 0:
                ty, ay = _taps(dy)
                acc = sum(ty[m] * ref[top + r + ay + m, left + c] for m in range(len(ty)))
                out[r, c] = min(max((acc + 32) >> 6, 0), 255)
            else:
                tx, ax = _taps(dx)
                ty, ay = _taps(dy)
                acc = 0
                for m in range(len(ty)):
                    row = top + r + ay + m
                    hsum = sum(tx[k] * ref[row, left + c + ax + k] for k in range(len(tx)))
                    acc += ty[m] * hsum
                out[r, c] = min(max((acc + 2048) >> 12, 0), 255)
    return out


class TestCoefficients:
    def test_tap_sums_are_64(self):
        for phase in (1, 2, 3):
            assert sum(std_coeffs(phase).taps) == 64

    def test_half_pel_has_8_taps_quarters_7(self):
        assert len(std_coeffs(2).taps) == 8
        assert len(std_coeffs(1).taps) == 7
        assert len(std_coeffs(3).taps) == 7

    def test_quarter_phases_mirror(self):
        assert std_coeffs(3).taps == tuple(reversed(std_coeffs(1).taps))

    def test_half_pel_values(self):
        assert std_coeffs(2).taps == (-1, 4, -11, 40, 40, -11, 4, -1)

    def test_integer_phase_rejected(self):
        with pytest.raises(ValueError):
            std_coeffs(0)


class TestInterp:
    def test_integer_position_is_copy(self, rng):
        ref = rng.integers(0, 256, (24, 24)).astype(np.uint8)
        out = interp_std(ref, 5, 7, 8, 6, (0, 0))
        assert np.array_equal(out, ref[5:13, 7:13])

    def test_constant_plane_preserved_all_positions(self):
        ref = np.full((40, 40), 100, dtype=np.uint8)
        for dy in range(4):
            for dx in range(4):
                out = interp_std(ref, 10, 10, 8, 8, (dx, dy))
                assert np.array_equal(out, np.full((8, 8), 100)), (dx, dy)

    def test_matches_direct_loop_oracle(self, rng):
        ref = rng.integers(0, 256, (32, 30)).astype(np.uint8)
        for frac in [(2, 2), (1, 0), (0, 3), (1, 3), (3, 1), (2, 1)]:
            got = interp_std(ref, 8, 8, 6, 7, frac)
            assert np.array_equal(got, interp_oracle(ref, 8, 8, 6, 7, frac)), frac

    def test_phase1_applied_to_constant_100(self):
        ref = np.full((20, 20), 100, dtype=np.uint8)
        assert np.array_equal(interp_std(ref, 6, 6, 4, 4, (1, 0)), np.full((4, 4), 100))

    def test_mirror_property(self, rng):
        ref = rng.integers(0, 256, (20, 40)).astype(np.uint8)
        mirrored = ref[:, ::-1].copy()
        top, left, h, w = 6, 10, 6, 8
        out1 = interp_std(mirrored, top, left, h, w, (1, 0))
        left3 = ref.shape[1] - 1 - w - left
        out3 = interp_std(ref, top, left3, h, w, (3, 0))
        assert np.array_equal(out1, out3[:, ::-1])

    def test_stage_order_commutes_integer(self, rng):
        # vertical-first with the same single final rounding must agree
        ref = rng.integers(0, 256, (30, 30)).astype(np.uint8)
        for frac in [(1, 1), (2, 3), (3, 2)]:
            dx, dy = frac
            tx, ax = _taps(dx)
            ty, ay = _taps(dy)
            h = w = 5
            top = left = 9
            out = np.zeros((h, w), dtype=int)
            refi = ref.astype(int)
            for r in range(h):
                for c in range(w):
                    acc = 0
                    for k in range(len(tx)):
                        col = left + c + ax + k
                        vsum = sum(ty[m] * refi[top + r + ay + m, col] for m in range(len(ty)))
                        acc += tx[k] * vsum
                    out[r, c] = min(max((acc + 2048) >> 12, 0), 255)
            assert np.array_equal(out, interp_std(ref, top, left, h, w, frac)), frac

    def test_stage_order_exact_on_float_path(self, rng):
        # all intermediate values are dyadic rationals well inside float64,
        # so the two stage orders are bitwise identical
        ref = rng.integers(0, 256, (30, 30)).astype(float)
        dx, dy = 1, 2
        tx, ax = _taps(dx)
        ty, ay = _taps(dy)
        txf = [t / 64.0 for t in tx]
        tyf = [t / 64.0 for t in ty]
        top = left = 8
        for r in range(4):
            for c in range(4):
                hv = sum(
                    tyf[m]
                    * sum(txf[k] * ref[top + r + ay + m, left + c + ax + k] for k in range(len(tx)))
                    for m in range(len(ty))
                )
                vh = sum(
                    txf[k]
                    * sum(tyf[m] * ref[top + r + ay + m, left + c + ax + k] for m in range(len(ty)))
                    for k in range(len(tx))
                )
                assert hv == vh

    def test_insufficient_margin_raises(self, rng):
        ref = rng.integers(0, 256, (20, 20)).astype(np.uint8)
        with pytest.raises(ValueError):
            interp_std(ref, 1, 5, 4, 4, (0, 2))  # needs 3 rows above
        with pytest.raises(ValueError):
            interp_std(ref, 5, 14, 4, 4, (2, 0))  # needs 4 cols right

    def test_margins_contract(self):
        assert margins((0, 0)) == (0, 0, 0, 0)
        assert margins((2, 2)) == (3, 3, 4, 4)
        assert margins((1, 3)) == (2, 3, 4, 3)

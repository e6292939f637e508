import math
from fractions import Fraction

import numpy as np
import pytest

from rrtarch.fixedpoint import FixedAngle, FixedCoord, wrap_angle


class TestResolutions:
    def test_coord_resolution_exact(self):
        assert FixedCoord.RESOLUTION == 0.00390625
        assert FixedCoord(1).value == 0.00390625

    def test_angle_resolution(self):
        assert FixedAngle.RESOLUTION == 0.0001220703125
        assert abs(FixedAngle.RESOLUTION - 0.00012207) < 1e-8

    def test_angle_range_covers_pi(self):
        assert FixedAngle(FixedAngle.RAW_MAX).value > math.pi
        assert FixedAngle(FixedAngle.RAW_MIN).value < -math.pi
        assert FixedAngle(FixedAngle.RAW_MIN).value == -4.0


class TestQuantization:
    def test_floor_toward_negative_infinity(self):
        assert FixedCoord.from_real(1.0).raw == 256
        assert FixedCoord.from_real(0.999).raw == 255
        assert FixedCoord.from_real(-0.001).raw == -1
        assert FixedAngle.from_real(-0.00006).raw == -1

    def test_round_trip_error_below_resolution(self):
        rng = np.random.default_rng(5)
        for v in rng.uniform(-1000, 1000, 500):
            err = v - FixedCoord.from_real(float(v)).value
            assert 0.0 <= err < FixedCoord.RESOLUTION
        for v in rng.uniform(-3.2, 3.2, 500):
            err = v - FixedAngle.from_real(float(v)).value
            assert 0.0 <= err < FixedAngle.RESOLUTION

    def test_saturates_instead_of_wrapping(self):
        assert FixedCoord.from_real(1e12).raw == FixedCoord.RAW_MAX
        assert FixedCoord.from_real(-1e12).raw == FixedCoord.RAW_MIN
        assert FixedAngle.from_real(100.0).raw == FixedAngle.RAW_MAX
        assert FixedAngle.from_real(-100.0).raw == FixedAngle.RAW_MIN

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            FixedCoord.from_real(float("nan"))
        with pytest.raises(ValueError):
            FixedAngle.from_real(float("inf"))

    def test_rejects_out_of_range_raw(self):
        with pytest.raises(ValueError):
            FixedCoord(1 << 31)
        with pytest.raises(ValueError):
            FixedAngle(1 << 15)


def exact_fixed_op(op, a_raw, b_raw, frac_bits, raw_min, raw_max):
    # oracle: exact rationals, floor, then saturate
    scale = 1 << frac_bits
    va, vb = Fraction(a_raw, scale), Fraction(b_raw, scale)
    if op == "add":
        result = va + vb
    elif op == "sub":
        result = va - vb
    else:
        result = va * vb
    raw = math.floor(result * scale)
    return min(max(raw, raw_min), raw_max)


class TestArithmeticOracle:
    def test_coord_ops_match_wide_oracle(self):
        rng = np.random.default_rng(17)
        raws = rng.integers(FixedCoord.RAW_MIN, FixedCoord.RAW_MAX + 1, (100_000, 2))
        for op, fn in (("add", lambda a, b: a + b), ("sub", lambda a, b: a - b), ("mul", lambda a, b: a * b)):
            for a_raw, b_raw in raws[:33_000 if op != "mul" else 34_000]:
                a, b = FixedCoord(int(a_raw)), FixedCoord(int(b_raw))
                want = exact_fixed_op(
                    op, int(a_raw), int(b_raw), 8, FixedCoord.RAW_MIN, FixedCoord.RAW_MAX
                )
                assert fn(a, b).raw == want, (op, a_raw, b_raw)

    def test_angle_ops_match_wide_oracle(self):
        rng = np.random.default_rng(19)
        raws = rng.integers(FixedAngle.RAW_MIN, FixedAngle.RAW_MAX + 1, (30_000, 2))
        for a_raw, b_raw in raws[:10_000]:
            a, b = FixedAngle(int(a_raw)), FixedAngle(int(b_raw))
            assert (a * b).raw == exact_fixed_op(
                "mul", int(a_raw), int(b_raw), 13, FixedAngle.RAW_MIN, FixedAngle.RAW_MAX
            )
            assert (a + b).raw == exact_fixed_op(
                "add", int(a_raw), int(b_raw), 13, FixedAngle.RAW_MIN, FixedAngle.RAW_MAX
            )
            assert (a - b).raw == exact_fixed_op(
                "sub", int(a_raw), int(b_raw), 13, FixedAngle.RAW_MIN, FixedAngle.RAW_MAX
            )

    def test_negative_product_floors_not_truncates(self):
        # -3/256 * 1/256 = -3/65536 floors to -1 raw, not 0
        assert (FixedCoord(-3) * FixedCoord(1)).raw == -1

    def test_negation_saturates_at_int_min(self):
        assert (-FixedCoord(FixedCoord.RAW_MIN)).raw == FixedCoord.RAW_MAX


class TestWrapAngle:
    def test_identity_inside_range(self):
        for v in (-3.14, -1.0, 0.0, 2.5, math.pi):
            assert wrap_angle(v) == pytest.approx(v)

    def test_wraps_beyond_pi(self):
        assert wrap_angle(math.pi + 0.5) == pytest.approx(-math.pi + 0.5)
        assert wrap_angle(-math.pi - 0.5) == pytest.approx(math.pi - 0.5)
        assert wrap_angle(7.0 * math.pi) == pytest.approx(math.pi)

    def test_output_always_in_half_open_interval(self):
        rng = np.random.default_rng(3)
        for v in rng.uniform(-50, 50, 2000):
            w = wrap_angle(float(v))
            assert -math.pi < w <= math.pi

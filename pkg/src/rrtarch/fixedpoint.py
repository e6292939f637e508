"""Saturating fixed-point scalars mirroring the planner's hardware formats.

Coordinates are Q24.8 in an int32 (resolution 1/256 = 0.00390625 map units);
angles are Q3.13 in an int16 (resolution 1/8192 radians, covering (-4, 4) and
so all of (-pi, pi]). Real values quantize by flooring toward negative
infinity, and every operation saturates at the raw integer bounds instead of
wrapping: wrap-around would teleport a state across the map.

Multiplication keeps the full double-width product and floors away the extra
fractional bits, exactly matching rational arithmetic truncated toward
negative infinity. The planner does its candidate scoring in doubles and
quantizes only committed states, so these scalars are the durable
representation, not the arithmetic hot path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def _quantize(value: float, frac_bits: int, raw_min: int, raw_max: int) -> int:
    if not math.isfinite(value):
        raise ValueError(f"cannot quantize non-finite value {value!r}")
    raw = math.floor(value * (1 << frac_bits))
    return min(max(raw, raw_min), raw_max)


def _saturate(raw: int, raw_min: int, raw_max: int) -> int:
    return min(max(raw, raw_min), raw_max)


@dataclass(frozen=True, order=True)
class FixedCoord:
    """Q24.8 map coordinate in a signed 32-bit raw."""

    raw: int

    FRAC_BITS = 8
    RAW_MIN = -(1 << 31)
    RAW_MAX = (1 << 31) - 1
    RESOLUTION = 1.0 / (1 << 8)

    def __post_init__(self):
        if not self.RAW_MIN <= self.raw <= self.RAW_MAX:
            raise ValueError(f"raw {self.raw} outside int32")

    @classmethod
    def from_real(cls, value: float) -> "FixedCoord":
        return cls(_quantize(value, cls.FRAC_BITS, cls.RAW_MIN, cls.RAW_MAX))

    @property
    def value(self) -> float:
        return self.raw / (1 << self.FRAC_BITS)

    def __add__(self, other: "FixedCoord") -> "FixedCoord":
        return FixedCoord(_saturate(self.raw + other.raw, self.RAW_MIN, self.RAW_MAX))

    def __sub__(self, other: "FixedCoord") -> "FixedCoord":
        return FixedCoord(_saturate(self.raw - other.raw, self.RAW_MIN, self.RAW_MAX))

    def __mul__(self, other: "FixedCoord") -> "FixedCoord":
        wide = (self.raw * other.raw) >> self.FRAC_BITS  # floor division
        return FixedCoord(_saturate(wide, self.RAW_MIN, self.RAW_MAX))

    def __neg__(self) -> "FixedCoord":
        return FixedCoord(_saturate(-self.raw, self.RAW_MIN, self.RAW_MAX))


@dataclass(frozen=True, order=True)
class FixedAngle:
    """Q3.13 angle in radians in a signed 16-bit raw."""

    raw: int

    FRAC_BITS = 13
    RAW_MIN = -(1 << 15)
    RAW_MAX = (1 << 15) - 1
    RESOLUTION = 1.0 / (1 << 13)

    def __post_init__(self):
        if not self.RAW_MIN <= self.raw <= self.RAW_MAX:
            raise ValueError(f"raw {self.raw} outside int16")

    @classmethod
    def from_real(cls, value: float) -> "FixedAngle":
        return cls(_quantize(value, cls.FRAC_BITS, cls.RAW_MIN, cls.RAW_MAX))

    @property
    def value(self) -> float:
        return self.raw / (1 << self.FRAC_BITS)

    def __add__(self, other: "FixedAngle") -> "FixedAngle":
        return FixedAngle(_saturate(self.raw + other.raw, self.RAW_MIN, self.RAW_MAX))

    def __sub__(self, other: "FixedAngle") -> "FixedAngle":
        return FixedAngle(_saturate(self.raw - other.raw, self.RAW_MIN, self.RAW_MAX))

    def __mul__(self, other: "FixedAngle") -> "FixedAngle":
        wide = (self.raw * other.raw) >> self.FRAC_BITS
        return FixedAngle(_saturate(wide, self.RAW_MIN, self.RAW_MAX))

    def __neg__(self) -> "FixedAngle":
        return FixedAngle(_saturate(-self.raw, self.RAW_MIN, self.RAW_MAX))


def wrap_angle(radians: float) -> float:
    """Map any angle into (-pi, pi]."""
    wrapped = math.fmod(radians + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi

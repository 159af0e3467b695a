"""Scalar fixed-point semantics: the normative definition of every
arithmetic unit in the simulated datapath.

All ops compute the exact result in unbounded integers, then requantize to
the destination format: round to nearest with ties away from zero,
saturate to the representable range (counting an overflow), and count an
underflow when a nonzero exact value flushes to raw zero.  The array
kernels (compiled and fallback) must match these ops bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..bitwidth import FixedPointFormat

# Counter slots shared with the array kernels.
OVERFLOW, UNDERFLOW, OPS_ADD, OPS_MUL, OPS_DIV = range(5)


@dataclass
class EventCounters:
    overflows: int = 0
    underflows: int = 0
    ops_add: int = 0
    ops_mul: int = 0
    ops_div: int = 0

    @property
    def total_ops(self) -> int:
        return self.ops_add + self.ops_mul + self.ops_div

    def merge(self, other: "EventCounters") -> "EventCounters":
        return EventCounters(
            self.overflows + other.overflows,
            self.underflows + other.underflows,
            self.ops_add + other.ops_add,
            self.ops_mul + other.ops_mul,
            self.ops_div + other.ops_div,
        )

    @classmethod
    def from_array(cls, arr) -> "EventCounters":
        return cls(int(arr[OVERFLOW]), int(arr[UNDERFLOW]), int(arr[OPS_ADD]), int(arr[OPS_MUL]), int(arr[OPS_DIV]))


@dataclass(frozen=True)
class FxNum:
    raw: int
    fmt: FixedPointFormat

    def __post_init__(self):
        if not self.fmt.raw_min <= self.raw <= self.fmt.raw_max:
            raise ValueError(f"raw {self.raw} outside format range")

    def to_float(self) -> float:
        return self.raw * 2.0**-self.fmt.frac_bits


def _round_half_away_div(num: int, den: int) -> int:
    """round(num / den) with ties away from zero; den > 0."""
    if num >= 0:
        return (2 * num + den) // (2 * den)
    return -((-2 * num + den) // (2 * den))


def _requant(exact: int, frac_exact: int, fmt: FixedPointFormat, counters: EventCounters) -> int:
    """Rescale an exact value (at frac_exact) into fmt, with events."""
    shift = frac_exact - fmt.frac_bits
    if shift >= 0:
        raw = _round_half_away_div(exact, 1 << shift) if shift else exact
    else:
        raw = exact << (-shift)
    if raw > fmt.raw_max:
        raw = fmt.raw_max
        counters.overflows += 1
    elif raw < fmt.raw_min:
        raw = fmt.raw_min
        counters.overflows += 1
    elif raw == 0 and exact != 0:
        counters.underflows += 1
    return raw


def fx_quantize(v: float, fmt: FixedPointFormat, counters: EventCounters) -> FxNum:
    raw = math.floor(abs(v) * (1 << fmt.frac_bits) + 0.5)
    if v < 0:
        raw = -raw
    if raw > fmt.raw_max:
        raw = fmt.raw_max
        counters.overflows += 1
    elif raw < fmt.raw_min:
        raw = fmt.raw_min
        counters.overflows += 1
    elif raw == 0 and v != 0.0:
        counters.underflows += 1
    return FxNum(raw, fmt)


def fx_add(a: FxNum, b: FxNum, out_fmt: FixedPointFormat, counters: EventCounters) -> FxNum:
    f = max(a.fmt.frac_bits, b.fmt.frac_bits)
    exact = (a.raw << (f - a.fmt.frac_bits)) + (b.raw << (f - b.fmt.frac_bits))
    counters.ops_add += 1
    return FxNum(_requant(exact, f, out_fmt, counters), out_fmt)


def fx_sub(a: FxNum, b: FxNum, out_fmt: FixedPointFormat, counters: EventCounters) -> FxNum:
    f = max(a.fmt.frac_bits, b.fmt.frac_bits)
    exact = (a.raw << (f - a.fmt.frac_bits)) - (b.raw << (f - b.fmt.frac_bits))
    counters.ops_add += 1
    return FxNum(_requant(exact, f, out_fmt, counters), out_fmt)


def fx_mul(a: FxNum, b: FxNum, out_fmt: FixedPointFormat, counters: EventCounters) -> FxNum:
    counters.ops_mul += 1
    return FxNum(_requant(a.raw * b.raw, a.fmt.frac_bits + b.fmt.frac_bits, out_fmt, counters), out_fmt)


def fx_div(a: FxNum, b: FxNum, out_fmt: FixedPointFormat, counters: EventCounters) -> FxNum:
    """Quotient; a zero raw divisor saturates toward the numerator's sign
    and counts an overflow, so a run can continue past it like the circuit."""
    counters.ops_div += 1
    if b.raw == 0:
        counters.overflows += 1
        return FxNum(out_fmt.raw_max if a.raw >= 0 else out_fmt.raw_min, out_fmt)
    shift = out_fmt.frac_bits + b.fmt.frac_bits - a.fmt.frac_bits
    num, den = a.raw, b.raw
    if shift >= 0:
        num <<= shift
    else:
        den <<= -shift
    if den < 0:
        num, den = -num, -den
    raw = _round_half_away_div(num, den)
    if raw > out_fmt.raw_max:
        raw = out_fmt.raw_max
        counters.overflows += 1
    elif raw < out_fmt.raw_min:
        raw = out_fmt.raw_min
        counters.overflows += 1
    elif raw == 0 and a.raw != 0:
        counters.underflows += 1
    return FxNum(raw, out_fmt)

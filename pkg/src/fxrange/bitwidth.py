"""Integer bit-width allocation and cost proxies.

``integer_bits`` maps an interval to the smallest integer field that can
hold every value in it: ceil(log2(max(|lo|, |hi|) + 1)), plus a sign bit
(kept as a flag rather than folded into the count, so range checks stay
symmetric).  Fraction bits are an input, not optimized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .affine import DomainError, Interval


@dataclass(frozen=True)
class FixedPointFormat:
    signed: bool
    int_bits: int
    frac_bits: int

    def __post_init__(self):
        if self.int_bits < 0 or self.frac_bits < 0:
            raise ValueError("negative bit counts")
        if self.total_bits < 1:
            raise ValueError("format has no bits")

    @property
    def total_bits(self) -> int:
        return self.int_bits + self.frac_bits + (1 if self.signed else 0)

    @property
    def raw_min(self) -> int:
        return -(1 << (self.int_bits + self.frac_bits)) if self.signed else 0

    @property
    def raw_max(self) -> int:
        return (1 << (self.int_bits + self.frac_bits)) - 1

    @property
    def lo(self) -> float:
        return self.raw_min * 2.0**-self.frac_bits

    @property
    def hi(self) -> float:
        return self.raw_max * 2.0**-self.frac_bits

    def covers(self, iv: Interval) -> bool:
        # Integer-field check: the sign/magnitude range must enclose the
        # interval (the top positive value loses one lsb to two's complement).
        return iv.lo >= -(2.0**self.int_bits) and iv.hi < 2.0**self.int_bits


FormatTable = dict[str, FixedPointFormat]


def integer_bits(iv: Interval, extra_bits: int = 0) -> tuple[int, bool]:
    """Smallest integer field for ``iv``; returns (int_bits, signed)."""
    if not (math.isfinite(iv.lo) and math.isfinite(iv.hi)):
        raise DomainError("non-finite interval")
    signed = iv.lo < 0.0
    mag = iv.magnitude()
    bits = math.ceil(math.log2(mag + 1.0)) if mag > 0.0 else 0
    return bits + extra_bits, signed


def allocate(
    intervals: dict[str, Interval],
    frac_bits: int = 16,
    extra_int_bits: int = 0,
    overrides: dict[str, int] | None = None,
) -> FormatTable:
    """Build a format per variable; ``overrides`` sets frac bits per name."""
    overrides = overrides or {}
    table: FormatTable = {}
    for name, iv in intervals.items():
        bits, signed = integer_bits(iv, extra_bits=extra_int_bits)
        fmt = FixedPointFormat(signed, bits, overrides.get(name, frac_bits))
        if not fmt.covers(iv):
            raise AssertionError(f"allocation for {name} does not cover {iv}")
        table[name] = fmt
    return table


def mult_count(n: int, n_hidden: int, m: int) -> int:
    """Multiplier invocations for one training step plus one prediction.

    Counts e once (shared between the two paths) and excludes divisions.
    """
    return 4 * n_hidden * n_hidden + (3 * m + n + 1) * n_hidden


# Array sizes held in buffers, per variable name, as functions of the model
# dimensions.  gamma4/gamma5 are scalars.
def _array_sizes(n: int, n_hidden: int, m: int) -> dict[str, int]:
    return {
        "x": n,
        "t": m,
        "alpha": n * n_hidden,
        "b": n_hidden,
        "P": n_hidden * n_hidden,
        "beta": n_hidden * m,
        "e": n_hidden,
        "h": n_hidden,
        "gamma1": n_hidden,
        "gamma2": n_hidden,
        "gamma3": n_hidden * n_hidden,
        "gamma4": 1,
        "gamma5": 1,
        "gamma6": n_hidden * n_hidden,
        "gamma7": n_hidden,
        "gamma8": m,
        "gamma9": m,
        "gamma10": n_hidden * m,
        "y": m,
    }


def storage_cost(table: FormatTable, n: int, n_hidden: int, m: int) -> int:
    """Total stored bits across all buffers; desk-scale stand-in for BRAM cost."""
    sizes = _array_sizes(n, n_hidden, m)
    missing = set(sizes) - set(table)
    if missing:
        raise KeyError(f"format table missing variables: {sorted(missing)}")
    return sum(sizes[name] * table[name].total_bits for name in sizes)

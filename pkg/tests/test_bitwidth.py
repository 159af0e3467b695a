import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fxrange.affine import DomainError, Interval
from fxrange.bitwidth import (
    FixedPointFormat,
    allocate,
    integer_bits,
    mult_count,
    storage_cost,
)


class TestIntegerBits:
    def test_signed_example(self):
        assert integer_bits(Interval(-16.0, 9.0)) == (5, True)

    def test_unsigned_unit(self):
        assert integer_bits(Interval(0.0, 1.0)) == (1, False)

    def test_zero_interval(self):
        assert integer_bits(Interval(0.0, 0.0)) == (0, False)

    def test_extra_bits(self):
        assert integer_bits(Interval(0.0, 1.0), extra_bits=2) == (3, False)

    def test_fractional_magnitude(self):
        # |0.9| needs one integer bit: ceil(log2(1.9)) == 1
        assert integer_bits(Interval(0.0, 0.9)) == (1, False)

    @given(st.floats(-1e9, 1e9), st.floats(0, 1e9))
    def test_resulting_field_always_covers(self, lo, width):
        iv = Interval(lo, lo + width)
        bits, signed = integer_bits(iv)
        assert iv.lo >= -(2.0**bits) and iv.hi < 2.0**bits
        assert signed == (iv.lo < 0.0)

    @given(st.floats(-1e9, 1e9), st.floats(0, 1e9))
    def test_minimality(self, lo, width):
        iv = Interval(lo, lo + width)
        bits, _ = integer_bits(iv)
        if bits > 0:
            assert iv.magnitude() + 1.0 > 2.0 ** (bits - 1)


class TestFormat:
    def test_total_bits_includes_sign(self):
        assert FixedPointFormat(True, 5, 16).total_bits == 22
        assert FixedPointFormat(False, 1, 16).total_bits == 17

    def test_raw_range(self):
        f = FixedPointFormat(True, 2, 3)
        assert f.raw_min == -32 and f.raw_max == 31
        u = FixedPointFormat(False, 2, 3)
        assert u.raw_min == 0 and u.raw_max == 31

    def test_negative_bits_rejected(self):
        with pytest.raises(ValueError):
            FixedPointFormat(True, -1, 16)

    def test_empty_format_rejected(self):
        with pytest.raises(ValueError):
            FixedPointFormat(False, 0, 0)

    def test_covers(self):
        f = FixedPointFormat(True, 5, 16)
        assert f.covers(Interval(-16.0, 9.0))
        assert not f.covers(Interval(-16.0, 32.0))


class TestAllocate:
    def test_basic_table(self):
        table = allocate({"a": Interval(-16.0, 9.0), "b": Interval(0.0, 1.0)}, frac_bits=8)
        assert table["a"] == FixedPointFormat(True, 5, 8)
        assert table["b"] == FixedPointFormat(False, 1, 8)

    def test_overrides(self):
        table = allocate({"a": Interval(0.0, 3.0)}, frac_bits=16, overrides={"a": 4})
        assert table["a"].frac_bits == 4

    def test_extra_int_bits(self):
        table = allocate({"a": Interval(0.0, 1.0)}, extra_int_bits=1)
        assert table["a"].int_bits == 2

    def test_nonfinite_interval_rejected(self):
        with pytest.raises(DomainError):
            Interval(0.0, math.inf)


class TestMultCount:
    def test_reference_configuration(self):
        assert mult_count(64, 48, 10) == 13776

    def test_formula_spot_values(self):
        # 4*Nh^2 + (3m + n + 1)*Nh
        assert mult_count(4, 5, 3) == 4 * 25 + (9 + 4 + 1) * 5
        assert mult_count(16, 8, 4) == 4 * 64 + (12 + 16 + 1) * 8
        assert mult_count(1, 1, 1) == 4 + 5

    def test_monotone_in_each_dimension(self):
        base = mult_count(4, 5, 3)
        assert mult_count(5, 5, 3) > base
        assert mult_count(4, 6, 3) > base
        assert mult_count(4, 5, 4) > base


class TestStorageCost:
    def _table(self, bits):
        from fxrange.analysis import VARIABLES

        return {name: FixedPointFormat(True, bits, 16) for name in VARIABLES}

    def test_monotone_in_width(self):
        assert storage_cost(self._table(6), 4, 5, 3) > storage_cost(self._table(5), 4, 5, 3)

    def test_counts_every_buffer(self):
        # uniform 1-bit-per-element check: total equals total element count
        from fxrange.analysis import VARIABLES

        table = {name: FixedPointFormat(False, 1, 0) for name in VARIABLES}
        n, nh, m = 2, 3, 4
        expected = (
            n + m + n * nh + nh + nh * nh + nh * m
            + nh + nh + nh + nh + nh * nh + 1 + 1 + nh * nh + nh + m + m + nh * m + m
        )
        assert storage_cost(table, n, nh, m) == expected

    def test_missing_variable_rejected(self):
        with pytest.raises(KeyError):
            storage_cost({"x": FixedPointFormat(False, 1, 0)}, 2, 3, 4)

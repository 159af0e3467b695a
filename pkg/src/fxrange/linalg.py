"""Matrices of affine forms: element-wise ops, products, matrix intervals.

Matrix products also track the range of every running accumulator prefix.
The modeled datapath shares one adder/multiplier per product, so the
accumulator register sees every intermediate sum, not just the final
element values; a format chosen from final values alone could overflow
mid-product.
"""

from __future__ import annotations

from dataclasses import dataclass

from .affine import AffineForm, AnalysisContext, Interval, add, constant, mul, sub


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class PartialSumTrace:
    """Hull of every intermediate accumulator value in a matrix product."""

    interval: Interval


@dataclass(frozen=True)
class AffineMatrix:
    rows: int
    cols: int
    elems: tuple[AffineForm, ...]  # row-major

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise ShapeError(f"invalid shape {self.rows}x{self.cols}")
        if len(self.elems) != self.rows * self.cols:
            raise ShapeError("element count does not match shape")

    def at(self, i: int, j: int) -> AffineForm:
        return self.elems[i * self.cols + j]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)


def mat_from_reals(values, ctx: AnalysisContext | None = None) -> AffineMatrix:
    """Wrap a 2D array of reals as a matrix of zero-width forms."""
    rows = len(values)
    if rows == 0:
        raise ShapeError("empty matrix")
    cols = len(values[0])
    elems = []
    for row in values:
        if len(row) != cols:
            raise ShapeError("ragged rows")
        elems.extend(constant(v, ctx) for v in row)
    return AffineMatrix(rows, cols, tuple(elems))


def mat_from_forms(forms: list[list[AffineForm]]) -> AffineMatrix:
    rows = len(forms)
    if rows == 0:
        raise ShapeError("empty matrix")
    cols = len(forms[0])
    elems = []
    for row in forms:
        if len(row) != cols:
            raise ShapeError("ragged rows")
        elems.extend(row)
    return AffineMatrix(rows, cols, tuple(elems))


def _require_same_shape(a: AffineMatrix, b: AffineMatrix):
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")


def mat_add(a: AffineMatrix, b: AffineMatrix) -> AffineMatrix:
    _require_same_shape(a, b)
    return AffineMatrix(a.rows, a.cols, tuple(add(x, y) for x, y in zip(a.elems, b.elems)))


def mat_sub(a: AffineMatrix, b: AffineMatrix) -> AffineMatrix:
    _require_same_shape(a, b)
    return AffineMatrix(a.rows, a.cols, tuple(sub(x, y) for x, y in zip(a.elems, b.elems)))


def transpose(a: AffineMatrix) -> AffineMatrix:
    elems = tuple(a.at(i, j) for j in range(a.cols) for i in range(a.rows))
    return AffineMatrix(a.cols, a.rows, elems)


def scale(a: AffineMatrix, s: AffineForm, ctx: AnalysisContext) -> AffineMatrix:
    """Multiply every element by the same scalar form (shared noise symbols)."""
    return AffineMatrix(a.rows, a.cols, tuple(mul(x, s, ctx) for x in a.elems))


def mat_mul(a: AffineMatrix, b: AffineMatrix, ctx: AnalysisContext) -> tuple[AffineMatrix, PartialSumTrace]:
    """Product with accumulator tracking.

    Summation order is fixed k = 0..v-1.  The trace hulls the interval of
    the accumulator after every addition, starting from its zero reset, so
    it always covers [0, 0] and every final element.
    """
    if a.cols != b.rows:
        raise ShapeError(f"inner dimensions differ: {a.shape} x {b.shape}")
    trace = Interval(0.0, 0.0)
    out: list[AffineForm] = []
    for i in range(a.rows):
        for j in range(b.cols):
            acc = constant(0.0, ctx)
            for k in range(a.cols):
                acc = add(acc, mul(a.at(i, k), b.at(k, j), ctx))
                trace = trace.hull(acc.interval())
            out.append(acc)
    return AffineMatrix(a.rows, b.cols, tuple(out)), PartialSumTrace(trace)


def mat_interval(a: AffineMatrix) -> Interval:
    iv = a.elems[0].interval()
    for e in a.elems[1:]:
        iv = iv.hull(e.interval())
    return iv


def elem_intervals(a: AffineMatrix) -> list[list[Interval]]:
    return [[a.at(i, j).interval() for j in range(a.cols)] for i in range(a.rows)]

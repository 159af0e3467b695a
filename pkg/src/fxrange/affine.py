"""Affine arithmetic: affine forms, noise symbols, and the basic operations.

An affine form represents a quantity as ``center + sum(coeff_i * eps_i)``
where each noise symbol ``eps_i`` ranges over [-1, 1].  Shared noise symbols
carry first-order correlation between quantities, so self-subtraction
cancels exactly instead of widening as plain interval arithmetic would.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class DomainError(ValueError):
    """Invalid input to an affine operation (bad bounds, non-finite values)."""


class DenominatorStraddlesZero(DomainError):
    """Reciprocal of a form whose interval contains zero is undefined."""


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainError(f"non-finite interval [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise DomainError(f"inverted interval [{self.lo}, {self.hi}]")

    def contains(self, v: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= v <= self.hi + tol

    def contains_interval(self, other: "Interval", tol: float = 0.0) -> bool:
        return self.lo - tol <= other.lo and other.hi <= self.hi + tol

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def magnitude(self) -> float:
        return max(abs(self.lo), abs(self.hi))


class AnalysisContext:
    """Mints fresh noise-symbol ids for one analysis run.

    Ids are strictly increasing and never reused within a context.  Forms
    from different contexts must not be mixed; this is checked when
    ``debug`` is set.
    """

    def __init__(self, debug: bool = False):
        self._next_id = 0
        self.debug = debug

    def fresh(self) -> int:
        nid = self._next_id
        self._next_id += 1
        return nid

    @property
    def symbols_minted(self) -> int:
        return self._next_id


@dataclass(frozen=True)
class AffineForm:
    """center + sum of coeff * eps over the ``terms`` map (noise id -> coeff).

    Zero coefficients are never stored, so the radius reflects live
    symbols only.
    """

    center: float
    terms: dict[int, float] = field(default_factory=dict)
    ctx: AnalysisContext | None = None

    def __post_init__(self):
        if not math.isfinite(self.center):
            raise DomainError(f"non-finite center {self.center}")
        for c in self.terms.values():
            if not math.isfinite(c):
                raise DomainError("non-finite coefficient in affine form")

    def radius(self) -> float:
        return sum(abs(c) for c in self.terms.values())

    def interval(self) -> Interval:
        r = self.radius()
        return Interval(self.center - r, self.center + r)

    def is_constant(self) -> bool:
        return not self.terms


def _merge_ctx(x: AffineForm, y: AffineForm) -> AnalysisContext | None:
    cx, cy = x.ctx, y.ctx
    if cx is not None and cy is not None and cx is not cy:
        if cx.debug or cy.debug:
            raise DomainError("mixing affine forms from different contexts")
    return cx if cx is not None else cy


def constant(value: float, ctx: AnalysisContext | None = None) -> AffineForm:
    return AffineForm(float(value), {}, ctx)


def from_interval(lo: float, hi: float, ctx: AnalysisContext) -> AffineForm:
    """Convert a known range [lo, hi] into an affine form with one fresh symbol."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError(f"non-finite bounds [{lo}, {hi}]")
    if lo > hi:
        raise DomainError(f"inverted bounds [{lo}, {hi}]")
    center = (hi + lo) / 2.0
    half = (hi - lo) / 2.0
    if half == 0.0:
        return AffineForm(center, {}, ctx)
    return AffineForm(center, {ctx.fresh(): half}, ctx)


def _combine(x: AffineForm, y: AffineForm, sign: float) -> AffineForm:
    terms = dict(x.terms)
    for nid, c in y.terms.items():
        merged = terms.get(nid, 0.0) + sign * c
        if merged == 0.0:
            terms.pop(nid, None)
        else:
            terms[nid] = merged
    return AffineForm(x.center + sign * y.center, terms, _merge_ctx(x, y))


def add(x: AffineForm, y: AffineForm) -> AffineForm:
    return _combine(x, y, 1.0)


def sub(x: AffineForm, y: AffineForm) -> AffineForm:
    return _combine(x, y, -1.0)


def mul(x: AffineForm, y: AffineForm, ctx: AnalysisContext) -> AffineForm:
    """Affine product with the conservative cross-term bound u*v on one fresh symbol.

    The fresh symbol is omitted when either operand is constant (u*v == 0),
    which keeps multiplication by constants exact.
    """
    _merge_ctx(x, y)
    terms: dict[int, float] = {}
    for nid, c in x.terms.items():
        v = y.center * c
        if v != 0.0:
            terms[nid] = v
    for nid, c in y.terms.items():
        v = terms.get(nid, 0.0) + x.center * c
        if v == 0.0:
            terms.pop(nid, None)
        else:
            terms[nid] = v
    u = x.radius()
    v = y.radius()
    q = u * v
    if q != 0.0:
        terms[ctx.fresh()] = q
    return AffineForm(x.center * y.center, terms, ctx)


def recip(y: AffineForm, ctx: AnalysisContext) -> AffineForm:
    """Min-max linear approximation of 1/y on a sign-definite interval.

    The negative branch is handled by reflection through zero; plugging a
    negative interval straight into the positive-branch q and d constants
    is not sound.
    """
    iv = y.interval()
    a, b = iv.lo, iv.hi
    if a <= 0.0 <= b:
        raise DenominatorStraddlesZero(f"denominator interval [{a}, {b}] contains 0")
    if b < 0.0:
        return _negate(recip(_negate(y), ctx))
    if a == b:
        return AffineForm(1.0 / a, {}, ctx)
    p = -1.0 / (b * b)
    q = (a + b) ** 2 / (2.0 * a * b * b)
    d = (a - b) ** 2 / (2.0 * a * b * b)
    terms = {nid: p * c for nid, c in y.terms.items() if p * c != 0.0}
    if d != 0.0:
        terms[ctx.fresh()] = d
    return AffineForm(p * y.center + q, terms, ctx)


def _negate(x: AffineForm) -> AffineForm:
    return AffineForm(-x.center, {nid: -c for nid, c in x.terms.items()}, x.ctx)


def div(x: AffineForm, y: AffineForm, ctx: AnalysisContext) -> AffineForm:
    return mul(x, recip(y, ctx), ctx)

"""Drivers for the fixed-point verification runs and the dynamic
(simulation-based) baseline analysis.

``run_fx_training`` mirrors the verification protocol: advance one
fixed-point training step per online sample, and before each advance probe
the training and prediction paths with random [0, 1] samples, accumulating
saturation/flush events and op counts.

``run_baseline_method`` is the double-precision exploration the static
analysis is compared against: it measures observed extrema per variable
across the whole run; formats derived from it conventionally get one extra
integer bit as a safety margin.
"""

from __future__ import annotations

import numpy as np

from ..affine import Interval
from ..analysis import VARIABLES, RangeReport, probe_step_batch
from ..bitwidth import FormatTable
from ..oselm import ModelState, train_step
from .formats import EventCounters

# Widest format the compiled kernel's 128-bit intermediates can take
# without wrapping (62 value bits per operand).
MAX_VALUE_BITS = 62


class FormatWidthError(ValueError):
    pass


def _fmts_array(table: FormatTable) -> np.ndarray:
    rows = []
    for name in VARIABLES:
        fmt = table[name]
        if fmt.int_bits + fmt.frac_bits > MAX_VALUE_BITS:
            raise FormatWidthError(f"{name}: {fmt.int_bits}+{fmt.frac_bits} value bits exceed {MAX_VALUE_BITS}")
        rows.append([fmt.frac_bits, fmt.raw_min, fmt.raw_max])
    return np.array(rows, dtype=np.int64)


def quantize_array(values: np.ndarray, fmt, counters: EventCounters) -> np.ndarray:
    """Vectorized quantization with the scalar rounding rule (ties away
    from zero); saturation and flush events land in ``counters``."""
    values = np.asarray(values, dtype=float)
    scaled = np.abs(values) * float(1 << fmt.frac_bits)
    raw = np.sign(values) * np.floor(scaled + 0.5)
    over = (raw > fmt.raw_max) | (raw < fmt.raw_min)
    counters.overflows += int(over.sum())
    raw = np.clip(raw, fmt.raw_min, fmt.raw_max)
    counters.underflows += int(((raw == 0) & (values != 0.0)).sum())
    return raw.astype(np.int64)


def _quantized_state(state: ModelState, table: FormatTable, counters: EventCounters):
    alpha = quantize_array(state.alpha, table["alpha"], counters)
    b = quantize_array(state.bias, table["b"], counters)
    P = np.ascontiguousarray(quantize_array(state.P, table["P"], counters))
    beta = np.ascontiguousarray(quantize_array(state.beta, table["beta"], counters))
    return alpha, b, P, beta


def run_fx_training(
    online_x: np.ndarray,
    online_t: np.ndarray,
    table: FormatTable,
    state0: ModelState,
    probes: int = 250,
    seed: int = 0,
    kernel=None,
) -> EventCounters:
    if kernel is None:
        from . import kernel
    fmts = _fmts_array(table)
    counters = EventCounters()
    alpha, b, P, beta = _quantized_state(state0, table, counters)
    raw_counts = np.zeros(5, dtype=np.int64)
    rng = np.random.default_rng(seed)
    n, m = state0.alpha.shape[0], state0.beta.shape[1]
    for x, t in zip(np.atleast_2d(online_x), np.atleast_2d(online_t)):
        xq = quantize_array(x, table["x"], counters)
        tq = quantize_array(t, table["t"], counters)
        kernel.train_step(xq, tq, alpha, b, P, beta, fmts, raw_counts)
        if probes:
            XS = quantize_array(rng.uniform(0.0, 1.0, size=(probes, n)), table["x"], counters)
            TS = quantize_array(rng.uniform(0.0, 1.0, size=(probes, m)), table["t"], counters)
            kernel.probe_batch(XS, TS, alpha, b, P, beta, fmts, raw_counts)
    return counters.merge(EventCounters.from_array(raw_counts))


def instrumented_op_counts(
    table: FormatTable, state0: ModelState, x: np.ndarray, t: np.ndarray, kernel=None
) -> tuple[EventCounters, EventCounters]:
    """Counters for exactly one training step and one prediction.

    The multiplier total under the shared-e mapping (e computed once,
    divisions excluded) is train.ops_mul + predict.ops_mul - n*n_hidden.
    """
    if kernel is None:
        from . import kernel
    fmts = _fmts_array(table)
    setup = EventCounters()
    alpha, b, P, beta = _quantized_state(state0, table, setup)
    xq = quantize_array(np.asarray(x, dtype=float).reshape(-1), table["x"], setup)
    tq = quantize_array(np.asarray(t, dtype=float).reshape(-1), table["t"], setup)
    train_counts = np.zeros(5, dtype=np.int64)
    kernel.train_step(xq, tq, alpha, b, P, beta, fmts, train_counts)
    predict_counts = np.zeros(5, dtype=np.int64)
    y = np.zeros(state0.beta.shape[1], dtype=np.int64)
    kernel.predict(xq, alpha, b, beta, fmts, predict_counts, y)
    return EventCounters.from_array(train_counts), EventCounters.from_array(predict_counts)


def fx_run_oselm(
    online_x: np.ndarray,
    online_t: np.ndarray,
    table: FormatTable,
    state0: ModelState,
    kernel=None,
) -> tuple[np.ndarray, np.ndarray, EventCounters]:
    """Train through all samples in fixed point (no probes); returns the
    final (P, beta) as floats for convergence checks."""
    if kernel is None:
        from . import kernel
    fmts = _fmts_array(table)
    counters = EventCounters()
    alpha, b, P, beta = _quantized_state(state0, table, counters)
    raw_counts = np.zeros(5, dtype=np.int64)
    for x, t in zip(np.atleast_2d(online_x), np.atleast_2d(online_t)):
        xq = quantize_array(x, table["x"], counters)
        tq = quantize_array(t, table["t"], counters)
        kernel.train_step(xq, tq, alpha, b, P, beta, fmts, raw_counts)
    counters = counters.merge(EventCounters.from_array(raw_counts))
    scale_P = 2.0 ** -table["P"].frac_bits
    scale_B = 2.0 ** -table["beta"].frac_bits
    return P * scale_P, beta * scale_B, counters


def run_baseline_method(
    online_x: np.ndarray,
    online_t: np.ndarray,
    state0: ModelState,
    probes: int = 1000,
    seed: int = 0,
) -> RangeReport:
    rng = np.random.default_rng(seed)
    state = ModelState(state0.alpha, state0.bias, state0.P.copy(), state0.beta.copy())
    n, m = state.alpha.shape[0], state.beta.shape[1]
    hull: dict[str, Interval] = {
        "alpha": Interval(float(state.alpha.min()), float(state.alpha.max())),
        "b": Interval(float(state.bias.min()), float(state.bias.max())),
        # parameter buffers hold their initial contents before any update
        "P": Interval(float(state.P.min()), float(state.P.max())),
        "beta": Interval(float(state.beta.min()), float(state.beta.max())),
    }
    for x, t in zip(np.atleast_2d(online_x), np.atleast_2d(online_t)):
        X = rng.uniform(0.0, 1.0, size=(probes, n))
        T = rng.uniform(0.0, 1.0, size=(probes, m))
        extrema = probe_step_batch(state, X, T)
        for name, (lo, hi) in extrema.items():
            iv = Interval(lo, hi)
            hull[name] = hull[name].hull(iv) if name in hull else iv
        state, _ = train_step(state, x, t)
    return RangeReport({name: hull[name] for name in VARIABLES})

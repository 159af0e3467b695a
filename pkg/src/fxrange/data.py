"""Dataset handling, seeded initialization, and report (de)serialization.

Reports are JSON: ``{"config": {...}, "variables": {name: {"interval":
[lo, hi], "signed": bool, "int_bits": k, "frac_bits": f}}, "counters":
...}``.  Floats are emitted with Python's shortest round-trip repr, which
json preserves exactly, so read(write(r)) == r bit for bit.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .affine import Interval
from .analysis import VARIABLES, RangeReport
from .bitwidth import FixedPointFormat, FormatTable


class DatasetError(ValueError):
    pass


class ReportSchemaError(ValueError):
    pass


@dataclass
class Dataset:
    """Normalized samples split into initial/online/test parts."""

    initial_x: np.ndarray
    initial_t: np.ndarray
    online_x: np.ndarray
    online_t: np.ndarray
    test_x: np.ndarray
    test_t: np.ndarray

    def __post_init__(self):
        if len(self.initial_x) == 0 or len(self.online_x) == 0:
            raise DatasetError("initial and online splits must be non-empty")


@dataclass
class RunConfig:
    n: int
    n_hidden: int
    m: int
    seed: int = 0
    frac_bits: int = 16
    probes: int = 250
    initial_samples: int = 0
    online_samples: int = 0
    test_samples: int = 0
    dataset_path: str | None = None

    def __post_init__(self):
        for name in ("n", "n_hidden", "m"):
            if getattr(self, name) < 1:
                raise DatasetError(f"{name} must be positive")
        if self.frac_bits < 0 or self.probes < 0:
            raise DatasetError("frac_bits and probes must be non-negative")

    def to_dict(self) -> dict:
        return {
            "n": self.n, "n_hidden": self.n_hidden, "m": self.m,
            "seed": self.seed, "frac_bits": self.frac_bits, "probes": self.probes,
            "initial_samples": self.initial_samples,
            "online_samples": self.online_samples,
            "test_samples": self.test_samples,
            "dataset_path": self.dataset_path,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ReportSchemaError(f"unknown config fields: {sorted(unknown)}")
        return cls(**d)


def load_config(path: str | Path) -> RunConfig:
    with open(path) as fh:
        return RunConfig.from_dict(json.load(fh))


def init_weights(seed: int, n: int, n_hidden: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform [-1, 1] hidden-layer weights and bias, deterministic per seed."""
    rng = np.random.default_rng([seed, 0x5eed])
    alpha = rng.uniform(-1.0, 1.0, size=(n, n_hidden))
    bias = rng.uniform(-1.0, 1.0, size=n_hidden)
    return alpha, bias


def gen_synthetic(seed: int, n: int, m: int, counts: tuple[int, int, int]) -> Dataset:
    """Uniform [0, 1] features with a random linear teacher squashed into [0, 1]."""
    if n < 1 or m < 1:
        raise DatasetError("n and m must be positive")
    initial, online, test = counts
    rng = np.random.default_rng([seed, 0xda7a])
    teacher = rng.uniform(-1.0, 1.0, size=(n, m))

    def make(count):
        x = rng.uniform(0.0, 1.0, size=(count, n))
        raw = x @ teacher + 0.1 * rng.standard_normal(size=(count, m))
        lo, hi = raw.min(axis=0), raw.max(axis=0)
        span = np.where(hi > lo, hi - lo, 1.0)
        return x, (raw - lo) / span

    ix, it = make(initial)
    ox, ot = make(online)
    tx, tt = make(max(test, 1))
    return Dataset(ix, it, ox, ot, tx, tt)


def load_csv(path: str | Path, n: int, m: int, splits: tuple[int, int, int]) -> Dataset:
    """Header row, n feature columns, one integer label column.

    Features are min-max normalized to [0, 1] with statistics from the
    initial+online rows; a constant column maps to 0.  Labels are one-hot
    encoded into m columns.
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DatasetError("empty file")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != n + 1:
                raise DatasetError(f"line {lineno}: expected {n + 1} columns, got {len(row)}")
            try:
                feats = [float(v) for v in row[:n]]
                label = int(row[n])
            except ValueError as exc:
                raise DatasetError(f"line {lineno}: {exc}") from exc
            if not 0 <= label < m:
                raise DatasetError(f"line {lineno}: label {label} out of range for {m} classes")
            rows.append((feats, label))

    initial, online, test = splits
    if len(rows) < initial + online:
        raise DatasetError(f"need {initial + online}+ rows, file has {len(rows)}")
    X = np.array([r[0] for r in rows], dtype=float)
    labels = np.array([r[1] for r in rows], dtype=int)
    T = np.eye(m)[labels]

    train = X[: initial + online]
    lo, hi = train.min(axis=0), train.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    Xn = np.clip((X - lo) / span, 0.0, 1.0)

    end_test = initial + online + test if test else len(rows)
    return Dataset(
        Xn[:initial], T[:initial],
        Xn[initial : initial + online], T[initial : initial + online],
        Xn[initial + online : end_test], T[initial + online : end_test],
    )


# ---------------------------------------------------------------------------
# Report JSON

_TOP_KEYS = {"config", "variables", "counters"}
_VAR_KEYS = {"interval", "signed", "int_bits", "frac_bits"}


def report_to_dict(report: RangeReport, table: FormatTable, config: RunConfig, counters: dict | None = None) -> dict:
    variables = {}
    for name, iv in report.variables.items():
        fmt = table[name]
        variables[name] = {
            "interval": [iv.lo, iv.hi],
            "signed": fmt.signed,
            "int_bits": fmt.int_bits,
            "frac_bits": fmt.frac_bits,
        }
    return {"config": config.to_dict(), "variables": variables, "counters": counters}


def write_report(path: str | Path, report: RangeReport, table: FormatTable, config: RunConfig, counters: dict | None = None):
    with open(path, "w") as fh:
        json.dump(report_to_dict(report, table, config, counters), fh, indent=2)
        fh.write("\n")


def read_report(path: str | Path) -> tuple[RangeReport, FormatTable, RunConfig, dict | None]:
    with open(path) as fh:
        doc = json.load(fh)
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ReportSchemaError(f"unknown top-level fields: {sorted(unknown)}")
    if "variables" not in doc or "config" not in doc:
        raise ReportSchemaError("report must have 'config' and 'variables'")
    config = RunConfig.from_dict(doc["config"])
    missing = set(VARIABLES) - set(doc["variables"])
    if missing:
        raise ReportSchemaError(f"missing variables: {sorted(missing)}")
    intervals: dict[str, Interval] = {}
    table: FormatTable = {}
    for name in VARIABLES:
        entry = doc["variables"][name]
        unknown = set(entry) - _VAR_KEYS
        if unknown:
            raise ReportSchemaError(f"variable {name}: unknown fields {sorted(unknown)}")
        lo, hi = entry["interval"]
        intervals[name] = Interval(lo, hi)
        table[name] = FixedPointFormat(bool(entry["signed"]), int(entry["int_bits"]), int(entry["frac_bits"]))
    return RangeReport(intervals), table, config, doc.get("counters")


def write_trace_csv(path: str | Path, trace) -> int:
    """HypothesisTrace -> CSV (step, variable, min, max); returns row count."""
    count = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "variable", "min", "max"])
        for step, name, lo, hi in trace.rows():
            writer.writerow([step, name, repr(lo), repr(hi)])
            count += 1
    return count

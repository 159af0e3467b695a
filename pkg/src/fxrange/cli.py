"""Command-line surface.

JSON written to --out is the machine-readable product; human-readable
summaries go to stderr.  Exit codes: 0 success, 1 usage or I/O error,
2 verification failure (e.g. coverage check failed).
"""

from __future__ import annotations

import csv
import json
import os
import sys

import click
import numpy as np

from .analysis import VARIABLES, check_hypothesis, run_hypothesis_experiment
from .bitwidth import storage_cost
from .data import (
    DatasetError,
    ReportSchemaError,
    RunConfig,
    read_report,
    write_report,
    write_trace_csv,
)
from .fixedpoint import BACKEND, run_fx_training
from .pipeline import aa_pipeline, baseline_pipeline, initial_state, resolve_dataset

USAGE_ERROR = 1
VERIFICATION_ERROR = 2


def _load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"cannot read config {path}: {exc}") from exc
    if "seed" not in raw and "FXRANGE_SEED" in os.environ:
        raw["seed"] = int(os.environ["FXRANGE_SEED"])
    try:
        return RunConfig.from_dict(raw)
    except (ReportSchemaError, DatasetError, TypeError) as exc:
        raise click.ClickException(f"bad config {path}: {exc}") from exc


def _log(msg: str):
    click.echo(msg, err=True)


@click.group()
def main():
    """Static range analysis and fixed-point verification for OS-ELM."""


@main.command("gen-data")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def gen_data(config_path, out_path):
    """Write a synthetic CSV dataset (features + integer label column)."""
    config = _load_config(config_path)
    rng = np.random.default_rng([config.seed, 0xc57])
    teacher = rng.uniform(-1.0, 1.0, size=(config.n, config.m))
    total = config.initial_samples + config.online_samples + max(config.test_samples, 1)
    X = rng.uniform(0.0, 1.0, size=(total, config.n))
    labels = np.argmax(X @ teacher, axis=1)
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{i}" for i in range(config.n)] + ["label"])
        for x, label in zip(X, labels):
            writer.writerow([repr(float(v)) for v in x] + [int(label)])
    _log(f"wrote {total} rows to {out_path}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
def analyze(config_path, out_path):
    """Full static analysis: intervals and bit-widths for every variable."""
    config = _load_config(config_path)
    report, table, _, _ = aa_pipeline(config)
    write_report(out_path, report, table, config)
    _log(f"{'variable':>8}  {'interval':>28}  format")
    for name in VARIABLES:
        iv, fmt = report[name], table[name]
        sign = "s" if fmt.signed else "u"
        _log(f"{name:>8}  [{iv.lo:12.5g}, {iv.hi:12.5g}]  {sign}{fmt.int_bits}.{fmt.frac_bits}")
    _log(f"report written to {out_path}")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--probes", default=1000, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def baseline(config_path, probes, out_path):
    """Simulation-based interval estimation (one extra integer bit added)."""
    config = _load_config(config_path)
    report, table, _, _ = baseline_pipeline(config, probes=probes)
    write_report(out_path, report, table, config)
    _log(f"baseline report ({probes} probes/step) written to {out_path}")


@main.command()
@click.option("--report", "report_path", required=True, type=click.Path(exists=True))
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path())
def fxsim(report_path, config_path, out_path):
    """Run the bit-exact fixed-point twin and count overflow/underflows."""
    config = _load_config(config_path)
    try:
        _, table, _, _ = read_report(report_path)
    except (ReportSchemaError, OSError) as exc:
        raise click.ClickException(f"bad report {report_path}: {exc}") from exc
    dataset = resolve_dataset(config)
    state = initial_state(config, dataset)
    counters = run_fx_training(
        dataset.online_x, dataset.online_t, table, state,
        probes=config.probes, seed=config.seed,
    )
    rate = (counters.overflows + counters.underflows) / counters.total_ops if counters.total_ops else 0.0
    _log(f"backend: {BACKEND}")
    _log(f"overflow: {counters.overflows}, underflow: {counters.underflows}")
    _log(f"ops: {counters.total_ops} (add {counters.ops_add}, mul {counters.ops_mul}, div {counters.ops_div})")
    _log(f"rate: {100.0 * rate:.2f}%")
    if out_path:
        with open(out_path, "w") as fh:
            json.dump(
                {
                    "config": config.to_dict(),
                    "counters": {
                        "overflows": counters.overflows,
                        "underflows": counters.underflows,
                        "ops_add": counters.ops_add,
                        "ops_mul": counters.ops_mul,
                        "ops_div": counters.ops_div,
                    },
                },
                fh, indent=2,
            )
            fh.write("\n")


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--probes", default=1000, show_default=True)
@click.option("--out-csv", "csv_path", required=True, type=click.Path())
def hypothesis(config_path, probes, csv_path):
    """Per-step observed intervals plus a step-1 containment summary."""
    config = _load_config(config_path)
    dataset = resolve_dataset(config)
    state = initial_state(config, dataset)
    trace = run_hypothesis_experiment(
        state, dataset.online_x, dataset.online_t, probes=probes, seed=config.seed
    )
    rows = write_trace_csv(csv_path, trace)
    _log(f"wrote {rows} rows ({trace.steps} steps) to {csv_path}")
    fractions = check_hypothesis(trace)
    for name, frac in fractions.items():
        _log(f"containment {name:>8}: {100.0 * frac:6.2f}%")
    overall = sum(fractions.values()) / len(fractions)
    _log(f"containment overall: {100.0 * overall:6.2f}%")


@main.command()
@click.option("--aa-report", "aa_path", required=True, type=click.Path(exists=True))
@click.option("--baseline-report", "base_path", required=True, type=click.Path(exists=True))
@click.pass_context
def compare(ctx, aa_path, base_path):
    """Coverage verdict (AA covers baseline) and storage-bits ratio."""
    try:
        aa_report, aa_table, aa_cfg, _ = read_report(aa_path)
        base_report, base_table, base_cfg, _ = read_report(base_path)
    except (ReportSchemaError, OSError) as exc:
        raise click.ClickException(f"bad report: {exc}") from exc
    for key in ("n", "n_hidden", "m", "seed", "frac_bits"):
        if getattr(aa_cfg, key) != getattr(base_cfg, key):
            raise click.ClickException(f"config mismatch on {key}")
    failures = []
    for name in VARIABLES:
        if not aa_report[name].contains_interval(base_report[name]):
            failures.append(name)
    dims = (aa_cfg.n, aa_cfg.n_hidden, aa_cfg.m)
    aa_bits = storage_cost(aa_table, *dims)
    base_bits = storage_cost(base_table, *dims)
    ratio = aa_bits / base_bits
    _log(f"storage bits: aa={aa_bits} baseline={base_bits} ratio={ratio:.3f}")
    if failures:
        _log(f"coverage FAIL: {', '.join(failures)}")
        ctx.exit(VERIFICATION_ERROR)
    _log("coverage PASS")


if __name__ == "__main__":
    main()

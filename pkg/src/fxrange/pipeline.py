"""End-to-end runs: config -> dataset -> initialized model -> reports.

Shared by the CLI and the test suite so both exercise the same wiring.
"""

from __future__ import annotations

import numpy as np

from .analysis import InputSpec, RangeReport, analyze
from .bitwidth import FormatTable, allocate
from .data import Dataset, RunConfig, gen_synthetic, init_weights, load_csv
from .fixedpoint.sim import run_baseline_method
from .oselm import ModelState, init


def resolve_dataset(config: RunConfig) -> Dataset:
    counts = (config.initial_samples, config.online_samples, config.test_samples)
    if config.dataset_path:
        return load_csv(config.dataset_path, config.n, config.m, counts)
    if not counts[0] or not counts[1]:
        raise ValueError("synthetic runs need initial_samples and online_samples")
    return gen_synthetic(config.seed, config.n, config.m, counts)


def initial_state(config: RunConfig, dataset: Dataset) -> ModelState:
    alpha, bias = init_weights(config.seed, config.n, config.n_hidden)
    H0 = dataset.initial_x @ alpha + bias
    P0, beta0 = init(H0, dataset.initial_t)
    return ModelState(alpha, bias, P0, beta0)


def aa_pipeline(config: RunConfig) -> tuple[RangeReport, FormatTable, ModelState, Dataset]:
    """Static analysis path: report plus formats with exact integer bits."""
    dataset = resolve_dataset(config)
    state = initial_state(config, dataset)
    spec = InputSpec(state.alpha, state.bias, state.P, state.beta)
    report = analyze(spec)
    table = allocate(report.variables, frac_bits=config.frac_bits)
    return report, table, state, dataset


def baseline_pipeline(config: RunConfig, probes: int | None = None) -> tuple[RangeReport, FormatTable, ModelState, Dataset]:
    """Dynamic baseline: probed extrema, one extra integer bit per format."""
    dataset = resolve_dataset(config)
    state = initial_state(config, dataset)
    report = run_baseline_method(
        dataset.online_x, dataset.online_t, state,
        probes=probes if probes is not None else max(config.probes, 1),
        seed=config.seed,
    )
    table = allocate(report.variables, frac_bits=config.frac_bits, extra_int_bits=1)
    return report, table, state, dataset

"""Compare the compiled and pure-Python fixed-point kernels.

Runs the same probed training workload through both backends and reports
wall time plus the speedup.  The two must agree bit for bit; this script
cross-checks the event counters as a sanity gate before timing.

Usage: python3 benchmarks/bench_backends.py [--samples N] [--probes N]
"""

import argparse
import time

from fxrange.data import RunConfig
from fxrange.fixedpoint import _pykernel
from fxrange.fixedpoint.sim import run_fx_training
from fxrange.pipeline import aa_pipeline

try:
    from fxrange.fixedpoint import _kernel
except ImportError:
    _kernel = None


def bench(kernel, table, state, ds, samples, probes, seed):
    start = time.perf_counter()
    counters = run_fx_training(
        ds.online_x[:samples], ds.online_t[:samples], table, state,
        probes=probes, seed=seed, kernel=kernel,
    )
    return time.perf_counter() - start, counters


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=20)
    parser.add_argument("--probes", type=int, default=100)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    config = RunConfig(
        n=16, n_hidden=8, m=4, seed=args.seed,
        initial_samples=40, online_samples=max(args.samples, 1),
    )
    _, table, state, ds = aa_pipeline(config)

    py_time, py_counters = bench(_pykernel, table, state, ds, args.samples, args.probes, args.seed)
    ops = py_counters.total_ops
    print(f"workload: {args.samples} samples x {args.probes} probes, {ops} fixed-point ops")
    print(f"python   : {py_time:8.3f}s  ({ops / py_time / 1e6:6.1f} Mops/s)")

    if _kernel is None:
        print("compiled : not built (pip install -e . with a C toolchain)")
        return
    cc_time, cc_counters = bench(_kernel, table, state, ds, args.samples, args.probes, args.seed)
    if cc_counters != py_counters:
        raise SystemExit("backends disagree on event counters; refusing to report timings")
    print(f"compiled : {cc_time:8.3f}s  ({ops / cc_time / 1e6:6.1f} Mops/s)")
    print(f"speedup  : {py_time / cc_time:.0f}x")


if __name__ == "__main__":
    main()

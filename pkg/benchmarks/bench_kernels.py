#!/usr/bin/env python3
"""Benchmark the episode kernel backends (numba jit loop vs pure numpy).

Times the per-round ranking/value kernel on synthetic workloads of
increasing size and prints rounds/second for each backend plus the
speedup. The numba path is warmed before timing so compilation is not
charged to the measurement.

Usage:
    python benchmarks/bench_kernels.py [--rounds N] [--objects M] [--repeats R]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from toprank._kernels import available_backends, get_backend


def make_workload(rng, T, m, explore_frac=0.2, pairwise=False):
    K = max(1, T // 50)
    shat_blocks = np.cumsum(rng.uniform(0, 1, size=(K, m)), axis=0)
    block_of_t = np.minimum(np.arange(T) // max(1, T // K), K - 1).astype(np.int64)
    expl_obj = np.where(
        rng.random(T) < explore_frac, rng.integers(0, m, size=T), -1
    ).astype(np.int64)
    pert = rng.uniform(0, 40, size=(T, m))
    levels = rng.integers(0, 2 if pairwise else 4, size=(T, m)).astype(np.float64)
    f_by_rank = 1.0 / np.log2(2.0 + np.arange(m))
    return shat_blocks, block_of_t, expl_obj, pert, levels, f_by_rank


def time_backend(backend, args, pairwise, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = backend.episode_values(*args, pairwise)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rounds", type=int, default=200_000)
    parser.add_argument("--objects", type=int, default=10)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    backends = {name: get_backend(name) for name in available_backends()}
    if "numba" in backends:
        backends["numba"].warmup()

    print(f"episode kernel, T={args.rounds} rounds, m={args.objects} objects, "
          f"best of {args.repeats}")
    for pairwise in (False, True):
        label = "pairwise counts" if pairwise else "weighted values"
        workload = make_workload(rng, args.rounds, args.objects, pairwise=pairwise)
        results = {}
        outputs = {}
        for name, backend in backends.items():
            seconds, out = time_backend(backend, workload, pairwise, args.repeats)
            results[name] = seconds
            outputs[name] = out
            print(f"  {label:16s} {name:6s} {seconds * 1e3:8.2f} ms "
                  f"({args.rounds / seconds / 1e6:6.2f} M rounds/s)")
        if len(outputs) == 2:
            diff = float(np.abs(outputs["numba"] - outputs["numpy"]).max())
            speedup = results["numpy"] / results["numba"]
            print(f"  {label:16s} agree to {diff:.2e}; numba speedup x{speedup:.2f}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs the same workloads in two subprocesses, one per BOXREACH_BACKEND
setting, then prints a timing table and the largest deviation between
the two backends' results (expected: 0 for the affine bounds, at most
an ulp in the transcendental activations).

Usage: python benchmarks/bench_backends.py
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

MLP_SWEEP = (50, 100, 200)
WIDE_LAYERS = (64, 64)
WIDE_PARTITION = 100
CLS_PARTITION = 20
REPEATS = 3


def wide_net():
    """Synthetic 2-in 2-out tanh net wide enough for the kernels to matter."""
    from boxreach import Activation, Layer, NetworkModel

    rng = np.random.default_rng(20240901)
    dims = (2,) + WIDE_LAYERS + (2,)
    layers = []
    for n_in, n_out in zip(dims[:-1], dims[1:]):
        layers.append(Layer(rng.normal(size=(n_out, n_in)) / np.sqrt(n_in),
                            rng.normal(size=n_out) * 0.1, Activation.TANH))
    return NetworkModel(layers)


def run_workloads(out_path: str):
    from boxreach import active_backend, reach_mlp, reach_nncs
    from boxreach.demo import demo_mlp, demo_mlp_input_box, demo_scenario
    from boxreach.geometry import PartitionSpec

    net = demo_mlp()
    box = demo_mlp_input_box()
    results = {"backend": active_backend()}

    reach_mlp(net, box, PartitionSpec.uniform(10, 2))  # warm up / JIT
    for m in MLP_SWEEP:
        spec = PartitionSpec.uniform(m, 2)
        best = min(_timed(lambda: reach_mlp(net, box, spec))
                   for _ in range(REPEATS))
        union = reach_mlp(net, box, spec)
        results[f"mlp_{m}_time"] = best
        results[f"mlp_{m}_los"] = union.los
        results[f"mlp_{m}_his"] = union.his

    wide = wide_net()
    spec = PartitionSpec.uniform(WIDE_PARTITION, 2)
    best = min(_timed(lambda: reach_mlp(wide, box, spec))
               for _ in range(REPEATS))
    union = reach_mlp(wide, box, spec)
    results["wide_time"] = best
    results["wide_los"] = union.los
    results["wide_his"] = union.his

    scenario = demo_scenario(partition=CLS_PARTITION)
    best = min(_timed(lambda: reach_nncs(scenario)) for _ in range(REPEATS))
    tube = reach_nncs(scenario)
    results["cls_time"] = best
    results["cls_states_lo"] = np.stack([s.state.lo for s in tube.steps])
    results["cls_states_hi"] = np.stack([s.state.hi for s in tube.steps])
    np.savez(out_path, **results)


def _timed(fn) -> float:
    start = time.perf_counter()
    fn()
    return time.perf_counter() - start


def orchestrate() -> int:
    rows = {}
    with tempfile.TemporaryDirectory() as tmp:
        for backend in ("numba", "numpy"):
            out = Path(tmp) / f"{backend}.npz"
            env = dict(os.environ, BOXREACH_BACKEND=backend)
            proc = subprocess.run(
                [sys.executable, __file__, "--inner", str(out)], env=env)
            if proc.returncode != 0:
                print(f"{backend} run failed", file=sys.stderr)
                return 1
            rows[backend] = dict(np.load(out))

    print(f"{'workload':<30}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    labels = [(f"mlp_{m}_time", f"reach_mlp M={m} ({m*m} cells)")
              for m in MLP_SWEEP]
    width = "x".join(map(str, WIDE_LAYERS))
    labels.append(("wide_time",
                   f"wide net {width}, M={WIDE_PARTITION}"))
    labels.append(("cls_time", f"closed loop M={CLS_PARTITION}"))
    for key, label in labels:
        tb = float(rows["numba"][key])
        tn = float(rows["numpy"][key])
        print(f"{label:<30}{tb:>10.4f}s{tn:>10.4f}s{tn / tb:>9.2f}x")

    worst = 0.0
    for key in rows["numba"]:
        if key.endswith(("_los", "_his", "_lo", "_hi")):
            worst = max(worst, float(np.max(np.abs(
                rows["numba"][key] - rows["numpy"][key]))))
    print(f"\nmax |numba - numpy| over all result boxes: {worst:.3e}")
    return 0


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--inner", metavar="OUT_NPZ",
                        help="run the workloads in-process and save results")
    args = parser.parse_args()
    if args.inner:
        run_workloads(args.inner)
        return 0
    return orchestrate()


if __name__ == "__main__":
    sys.exit(main())

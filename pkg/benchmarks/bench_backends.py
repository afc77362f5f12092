#!/usr/bin/env python3
"""Benchmark the convolution kernel backends against each other.

Times the three convolution primitives on the block shapes the layer GANs
actually see (side 4..32, channels 32/64, stride 2, 4x4 kernels), plus a
short end-to-end training run per backend. Numbers from this script are
why the NumPy/BLAS backend is the default; rerun it on your machine with:

    python benchmarks/bench_backends.py [--iters 60]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from gti.nn.backends import available_backends


def time_call(fn, *args, reps: int = 50) -> float:
    fn(*args)  # warm up
    t0 = time.perf_counter()
    for _ in range(reps):
        fn(*args)
    return (time.perf_counter() - t0) / reps * 1e3  # ms


def kernel_benchmarks() -> None:
    backends = available_backends()
    rng = np.random.default_rng(0)
    shapes = [
        # batch, cin, cout, side, kernel, stride, padding
        (34, 1, 32, 4, 4, 2, 1),
        (11, 1, 32, 12, 4, 2, 1),
        (11, 32, 64, 6, 4, 2, 1),
        (8, 1, 32, 32, 4, 2, 1),
        (8, 32, 64, 16, 4, 2, 1),
        (64, 32, 64, 8, 4, 2, 1),
    ]
    header = f"{'shape (B,Ci,Co,H,K)':<24} {'op':<10}"
    for name in backends:
        header += f" {name + ' [ms]':>12}"
    print(header)
    print("-" * len(header))
    for b, ci, co, h, k, s, p in shapes:
        x = rng.normal(size=(b, ci, h, h))
        kern = rng.normal(size=(co, ci, k, k))
        oh = (h + 2 * p - k) // s + 1
        dy = rng.normal(size=(b, co, oh, oh))
        rows = [
            ("fwd", lambda m: time_call(m.conv_fwd, x, kern, s, p)),
            ("bwd_data", lambda m: time_call(m.conv_bwd_data, dy, kern, s, p, (h, h))),
            ("bwd_kernel", lambda m: time_call(m.conv_bwd_kernel, x, dy, s, p, (k, k))),
        ]
        label = f"({b},{ci},{co},{h},{k})"
        for op_name, runner in rows:
            line = f"{label:<24} {op_name:<10}"
            for name, mod in backends.items():
                line += f" {runner(mod):>12.3f}"
            print(line)
            label = ""


def training_benchmark(iterations: int) -> None:
    """Run a short layer-GAN training in a subprocess per backend."""
    code = r"""
import time
from gti.nn import BACKEND
from gti.graph import gen_ba
from gti.partition import partition_balanced
from gti.gan import GanConfig, make_subgraph_batch, train_layer_gan

g = gen_ba(100, 2, seed=1)
p = partition_balanced(g, 11, seed=0)
batch = make_subgraph_batch(g, p, 0)
t0 = time.perf_counter()
train_layer_gan(batch, GanConfig(iterations=ITERS, seed=0))
print(f"{BACKEND}: {time.perf_counter() - t0:.2f} s for ITERS iterations")
""".replace("ITERS", str(iterations))
    for name in available_backends():
        env = dict(os.environ, GTI_NN_BACKEND=name)
        result = subprocess.run([sys.executable, "-c", code], env=env,
                                check=True, capture_output=True, text=True)
        print(result.stdout, end="")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--iters", type=int, default=60,
                        help="training iterations for the end-to-end timing")
    args = parser.parse_args()
    print("== kernel micro-benchmarks ==")
    kernel_benchmarks()
    print()
    print("== layer training (k=12, 11 blocks) ==")
    training_benchmark(args.iters)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

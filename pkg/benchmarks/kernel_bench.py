"""Compare the compiled sequence kernel against the numpy fallback.

Usage: python benchmarks/kernel_bench.py [--steps 2100] [--repeats 3]

Times representative workloads (a single large ring and a ten-ring network
with random wiring) on every available backend and checks that the
trajectories agree.
"""
import argparse
import time

import numpy as np

from cycleres import kernels
from cycleres.reservoir import Activation, BuildContext, MSCRGenotype, build_system
from cycleres.signs import BernoulliSignSource
from cycleres.reservoir import scr_single


def cases(steps):
    rng = np.random.default_rng(0)
    inputs = rng.uniform(0, 0.5, steps)

    single = scr_single(1000, 0.95, BernoulliSignSource(1), Activation.TANH,
                        bias_enabled=True)
    yield "single ring n=1000 tanh", single, inputs

    k, n = 10, 100
    a = (rng.random((k, k)) < 0.5).astype(np.uint8)
    np.fill_diagonal(a, 0)
    h = rng.normal(size=(k, k))
    np.fill_diagonal(h, 0)
    g = MSCRGenotype(k=k, s=rng.normal(size=k), H=h,
                     d=np.ones(k, dtype=np.uint8), A=a)
    ctx = BuildContext(n=n, rho=0.95, activation=Activation.TANH,
                       sign_mode="bernoulli", sign_seed=2)
    network = build_system(g, ctx)
    yield f"network k=10 n=100 ({network._edge_src.shape[0]} edges) tanh", network, inputs


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--steps", type=int, default=2100)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    names = kernels.available_backends()
    print(f"backends: {', '.join(names)} (active: {kernels.backend_name()})\n")
    for label, system, inputs in cases(args.steps):
        print(label)
        reference = None
        for name in names:
            backend = kernels._load(name)
            best = float("inf")
            for _ in range(args.repeats):
                t0 = time.perf_counter()
                out = system.run(inputs, washout=100, backend=backend)
                best = min(best, time.perf_counter() - t0)
            rate = args.steps / best
            agree = ""
            if reference is None:
                reference = out
            else:
                err = np.abs(out - reference).max() / max(1.0, np.abs(reference).max())
                agree = f"  (max rel diff vs first backend: {err:.2e})"
            print(f"  {name:7s} {best * 1e3:8.1f} ms  {rate:9.0f} steps/s{agree}")
        print()


if __name__ == "__main__":
    main()

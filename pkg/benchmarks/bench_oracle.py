"""Compare the oracle descent backends on identical workloads.

Runs the same restart set through the jit-compiled kernel and the pure-numpy
twin, prints per-restart timings and the speedup.  The first jit call
compiles and is excluded via a warmup run.

Usage: python3 benchmarks/bench_oracle.py [--m 3 --n 3 --restarts 8 --iters 2000]
"""

import argparse
import time

import numpy as np

from rank2lu.kernels import BACKENDS, NUMBA_AVAILABLE, get_descent, param_count
from rank2lu.lab import equivalent_pair, inequivalent_pair, random_class_state
from rank2lu.states import BipartiteShape, assemble


def build_workloads(m: int, n: int, seed: int):
    shape = BipartiteShape(m, n)
    base = random_class_state(shape, 0.7, seed=seed)
    image, _ = equivalent_pair(base, seed=seed + 1)
    workloads = [("equivalent", assemble(base).rho, assemble(image).rho)]
    if m >= 3:
        s1, s2 = inequivalent_pair(shape, 0.7, seed=seed + 2)
        workloads.append(("inequivalent", assemble(s1).rho, assemble(s2).rho))
    return workloads


def run_backend(backend: str, workloads, m: int, n: int, restarts: int, iters: int, seed: int):
    descend = get_descent(backend)
    p = param_count(m) + param_count(n)
    # warmup triggers jit compilation outside the timed region
    warm = workloads[0]
    descend(warm[1], warm[2], m, n, np.zeros(p), 5, 0.1, 30, 1e-14)
    rows = []
    for name, rho1, rho2 in workloads:
        rng = np.random.default_rng(seed)
        start = time.perf_counter()
        best = np.inf
        total_iters = 0
        for k in range(restarts):
            theta0 = np.zeros(p) if k == 0 else rng.normal(size=p)
            f, _, it = descend(rho1, rho2, m, n, theta0, iters, 0.1, 30, 1e-14)
            best = min(best, f)
            total_iters += int(it)
        elapsed = time.perf_counter() - start
        rows.append((name, elapsed, elapsed / restarts, total_iters, np.sqrt(best)))
    return rows


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--m", type=int, default=3)
    parser.add_argument("--n", type=int, default=3)
    parser.add_argument("--restarts", type=int, default=8)
    parser.add_argument("--iters", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    workloads = build_workloads(args.m, args.n, args.seed)
    backends = sorted(BACKENDS)
    if not NUMBA_AVAILABLE:
        print("note: numba unavailable, timing the numpy backend only")
        backends = ["numpy"]

    results = {}
    for backend in backends:
        results[backend] = run_backend(
            backend, workloads, args.m, args.n, args.restarts, args.iters, args.seed
        )

    header = f"{'workload':<14} {'backend':<8} {'total s':>9} {'s/restart':>10} {'iters':>8} {'residual':>10}"
    print(f"shape ({args.m}, {args.n}), {args.restarts} restarts x {args.iters} iters")
    print(header)
    print("-" * len(header))
    for i, (name, *_rest) in enumerate(results[backends[0]]):
        for backend in backends:
            wname, elapsed, per, iters, residual = results[backend][i]
            print(
                f"{wname:<14} {backend:<8} {elapsed:>9.3f} {per:>10.4f} "
                f"{iters:>8d} {residual:>10.2e}"
            )
        if len(backends) == 2:
            speedup = results["numpy"][i][1] / results["numba"][i][1]
            print(f"{'':<14} numba speedup: {speedup:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

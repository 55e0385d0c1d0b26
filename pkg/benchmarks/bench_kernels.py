"""Benchmark the numba-compiled kernels against the pure-numpy fallback.

Usage:
    python benchmarks/bench_kernels.py [--repeats 50] [--sizes 64,256,1024]

The same kernels back every stencil application and SOR sweep in the
package; the numpy path is what runs under TAYLORMARCH_NUMBA=0.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from taylormarch.kernels import get_implementations
from taylormarch.stencils import make_stencil


def _time_call(fn, args, repeats: int) -> float:
    fn(*args)  # warm-up (JIT compile / cache touch)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_stencil_1d(impls, n: int, repeats: int):
    spec = make_stencil(2, 4)
    w = spec.scaled_weights(1.0 / n)
    offs = np.asarray(spec.offsets, dtype=np.int64)
    g = len(spec.offsets) // 2
    vals = np.sin(np.linspace(0, 6.28, n + 2 * g))
    out = np.zeros_like(vals)
    return {name: _time_call(k["stencil_1d"], (vals, w, offs, g, g + n, out), repeats)
            for name, k in impls.items()}


def bench_stencil_2d(impls, n: int, repeats: int):
    spec = make_stencil(2, 2)
    w = spec.scaled_weights(1.0 / n)
    offs = np.asarray(spec.offsets, dtype=np.int64)
    g = 1
    rng = np.random.default_rng(0)
    vals = rng.standard_normal((n + 2 * g, n + 2 * g))
    out = np.zeros_like(vals)
    return {name: _time_call(k["stencil_2d_axis0"], (vals, w, offs, g, g + n, 0, n + 2 * g, out), repeats)
            for name, k in impls.items()}


def bench_sor(impls, n: int, repeats: int):
    g = 1
    rng = np.random.default_rng(1)
    p = rng.standard_normal((n + 2 * g, n + 2 * g))
    rhs = rng.standard_normal((n + 2 * g, n + 2 * g))
    cx = cy = float(n * n)

    def sweep(kern):
        def run(*_):
            kern(p, rhs, cx, cy, 1.7, g, g + n, g, g + n, 0)
            kern(p, rhs, cx, cy, 1.7, g, g + n, g, g + n, 1)
        return run

    return {name: _time_call(sweep(k["sor_sweep_2d"]), (), repeats)
            for name, k in impls.items()}


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=50)
    ap.add_argument("--sizes", default="64,256,1024")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    impls = {"numpy": get_implementations("numpy")}
    try:
        impls["numba"] = get_implementations("numba")
    except ImportError:
        print("numba not importable; benchmarking the numpy path only")

    benches = [("stencil_1d", bench_stencil_1d),
               ("stencil_2d", bench_stencil_2d),
               ("sor_sweep_2d", bench_sor)]

    header = f"{'kernel':<14} {'n':>6} " + "".join(f"{name:>12}" for name in impls) + "   speedup"
    print(header)
    print("-" * len(header))
    for name, bench in benches:
        for n in sizes:
            times = bench(impls, n, args.repeats)
            cols = "".join(f"{times[k] * 1e6:>10.1f}us" for k in impls)
            if len(times) == 2:
                speed = times["numpy"] / times["numba"]
                print(f"{name:<14} {n:>6} {cols}   {speed:6.1f}x")
            else:
                print(f"{name:<14} {n:>6} {cols}")


if __name__ == "__main__":
    main()

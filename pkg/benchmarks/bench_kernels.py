"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py --trials 20000 --repeat 5
"""

import argparse
import time

import numpy as np

from misobc import kernels


def cn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=20_000)
    parser.add_argument("--m", type=int, default=2)
    parser.add_argument("--k", type=int, default=4)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    m, k, n = args.m, args.k, args.trials
    rng = np.random.default_rng(0)
    basis = cn(rng, n * m, m - 1, m)
    h = cn(rng, n, k, m)
    v = cn(rng, n, 1 + k, m)
    v /= np.linalg.norm(v, axis=2, keepdims=True)
    p_private = np.full(m, 50.0)
    p_degraded = np.linspace(900.0, 90.0, k - m)

    found = kernels.backends()
    print(f"trials={n} m={m} k={k} best of {args.repeat}; default backend: {kernels.BACKEND}")
    results = {}
    for name, mod in found.items():
        g = mod.stream_gains(h, v)
        results[name] = {
            "null_directions": best_of(lambda: mod.null_directions(basis, 1e-6), args.repeat),
            "stream_gains": best_of(lambda: mod.stream_gains(h, v), args.repeat),
            "layered_rates": best_of(
                lambda: mod.layered_rates(g, 900.0, p_private, p_degraded, m, True), args.repeat),
        }
    names = list(results)
    print(f"{'kernel':<18}" + "".join(f"{x:>12}" for x in names) +
          ("     speedup" if len(names) == 2 else ""))
    for kernel in results[names[0]]:
        row = [results[x][kernel] for x in names]
        line = f"{kernel:<18}" + "".join(f"{t * 1e3:>10.2f}ms" for t in row)
        if len(names) == 2:
            line += f"{row[0] / row[1]:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()

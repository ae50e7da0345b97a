"""Benchmark the compiled kernels against the pure-NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--repeats N] [--size N]

Times each hot kernel on representative array sizes, verifies the two
backends agree, and prints a comparison table.
"""

import argparse
import timeit

import numpy as np

from pseudoparab import _kernels_py as pure

try:
    from pseudoparab import _kernels_cy as compiled
except ImportError:
    compiled = None


def make_inputs(n):
    rng = np.random.default_rng(7)
    x = np.linspace(0.0, 1.0, n + 1)
    y = np.linspace(0.0, 1.0, n + 1)
    f = rng.normal(size=n + 1)
    g = rng.normal(size=(n + 1, n + 1))
    t = np.sort(rng.uniform(0.0, 1.0, n + 1))
    return {
        "cumtrapz1": (x, f),
        "cumtrapz2_axis0": (x, g),
        "cumtrapz2_axis1": (y, g),
        "interp1": (x, f, t),
        "interp_columns": (x, g, t),
        "interp_rows": (y, g, t),
        "bilinear": (x, y, g, t, t[::-1].copy()),
        "deriv3": (x, f),
    }


def bench(module, name, args, repeats):
    fn = getattr(module, name)
    fn(*args)  # warm up
    return min(timeit.repeat(lambda: fn(*args), number=repeats, repeat=3)) / repeats


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--size", type=int, default=512, help="grid cells per axis")
    args = parser.parse_args()

    inputs = make_inputs(args.size)
    print(f"grid: {args.size}x{args.size} cells, best of 3 x {args.repeats} runs")
    header = f"{'kernel':<18}{'pure (ms)':>12}{'compiled (ms)':>15}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, call_args in inputs.items():
        t_pure = bench(pure, name, call_args, args.repeats)
        if compiled is None:
            print(f"{name:<18}{t_pure * 1e3:>12.3f}{'n/a':>15}{'n/a':>10}")
            continue
        out_p = getattr(pure, name)(*call_args)
        out_c = getattr(compiled, name)(*call_args)
        assert np.allclose(np.asarray(out_p), np.asarray(out_c), atol=1e-12), name
        t_comp = bench(compiled, name, call_args, args.repeats)
        print(
            f"{name:<18}{t_pure * 1e3:>12.3f}{t_comp * 1e3:>15.3f}"
            f"{t_pure / t_comp:>9.2f}x"
        )
    if compiled is None:
        print("\ncompiled backend unavailable; showing pure timings only")


if __name__ == "__main__":
    main()

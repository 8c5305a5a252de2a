"""Benchmark: compiled chain kernel vs pure-Python fallback.

Runs the same hit-and-run workload through both backends and prints a small
table of steps/second plus the speedup.  The two backends are
operation-identical, so outputs are checked bit-for-bit while timing.

Usage: python benchmarks/bench_chain_backends.py [--n 200] [--sweeps 400]
"""

import argparse
import time

import numpy as np

from oball import parse_orlicz
from oball.montecarlo import _chain_py

try:
    from oball.montecarlo import _chain_cy
except ImportError:  # pragma: no cover
    _chain_cy = None


def bench(advance, label, v, n, sweeps, uniforms):
    kinds, coefs, params = v.packed()
    x = np.zeros(n)
    start = time.perf_counter()
    advance(x, n * 1.0, sweeps, uniforms, kinds, coefs, params)
    elapsed = time.perf_counter() - start
    steps = n * sweeps
    print(f"  {label:<8} {elapsed:9.3f} s   {steps / elapsed:12.0f} steps/s")
    return x, elapsed


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=200, help="dimension")
    ap.add_argument("--sweeps", type=int, default=400, help="full sweeps")
    args = ap.parse_args()

    gen = np.random.default_rng(0)
    uniforms = gen.random(2 * args.sweeps * args.n)

    for expr in ("x^2", "x^4 + x^2"):
        v = parse_orlicz(expr)
        print(f"constraint {expr!r}, n={args.n}, sweeps={args.sweeps}:")
        x_py, t_py = bench(_chain_py.advance, "python", v, args.n, args.sweeps, uniforms)
        if _chain_cy is not None:
            x_cy, t_cy = bench(_chain_cy.advance, "cython", v, args.n, args.sweeps, uniforms)
            identical = np.array_equal(x_py, x_cy)
            print(f"  speedup {t_py / t_cy:8.1f} x   bit-identical: {identical}")
        else:
            print("  (compiled kernel unavailable)")
        print()


if __name__ == "__main__":
    main()

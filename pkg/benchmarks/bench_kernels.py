"""Throughput comparison: numba tape kernel vs the pure-numpy fallback.

Run directly:

    python3 benchmarks/bench_kernels.py [n_samples]

The script times the renormalized integrands of the worked graphs on a
shared sample batch under both backends (the numpy path is exercised
in-process by calling the fallback interpreter directly, so a single run
covers both).
"""

import sys
import time

import numpy as np

from phi3hopf.bphz import renormalized_node, routed
from phi3hopf.graphs import named_graph
from phi3hopf.numerics import kernels
from phi3hopf.numerics.tape import compile_node


def bench(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 400_000
    cases = [("oneloop-se", 4), ("nested2loop", 6), ("threeloop-b", 6)]
    rng = np.random.default_rng(12)
    print(f"active backend: {kernels.active_backend()}   samples per case: {n}")
    header = f"{'graph':>14} {'dim':>4} {'regs':>5} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, dim in cases:
        rg = routed(named_graph(name), dim)
        tape = compile_node(renormalized_node(rg), rg.basis_size)
        samples = rng.standard_normal((n, rg.basis_size, dim))
        if kernels.active_backend() == "numba":
            kernels.evaluate_tape(tape, samples[:128])  # compile outside the clock
            t_numba = bench(kernels.evaluate_tape, tape, samples)
        else:
            t_numba = float("nan")
        t_numpy = bench(kernels._evaluate_numpy, tape, samples)
        ratio = t_numpy / t_numba if t_numba == t_numba else float("nan")
        print(
            f"{name:>14} {dim:>4} {tape.n_regs:>5} {1e3 * t_numba:>10.1f} "
            f"{1e3 * t_numpy:>10.1f} {ratio:>7.1f}x"
        )


if __name__ == "__main__":
    main()

"""Time each hot kernel under the numba and numpy backends.

    python benchmarks/bench_kernels.py [--repeat N]

The first numba call of each kernel is a warm-up (JIT compile) and is not
timed.  Results are checked equal across backends before timing.
"""

import argparse
import time

import numpy as np

from otlab import _accel, kernels
from otlab.solver import _all_words, build_graph


def cases(rng):
    A = rng.integers(0, 7, size=(60, 80))
    R, piv = kernels.rref(rng.integers(0, 2, size=(12, 14)), 3)
    L = rng.integers(0, 5, size=(18, 4))
    G = build_graph(8, 2)
    P = _all_words(*G.adjacency.shape)

    def clique():
        shared = np.zeros(1, dtype=np.int64)
        c, size, nodes, _ = kernels.max_clique(G.adjacency, [], P.copy(), shared, False, 10**8)
        return size, nodes

    return {
        "rref 60x80 mod 7": lambda: kernels.rref(A, 7)[1].tolist(),
        "count01 rank-12 mod 3": lambda: kernels.count01(R[: len(piv)], 3),
        "pmf 2^18 -> F_5^4": lambda: kernels.pmf_counts(L, 5).tolist(),
        "sigma_all F_5^4": lambda: kernels.sigma_all(L, 5).tolist(),
        "first_low_sigma F_5^4": lambda: kernels.first_low_sigma(L, 5, 10**9),
        "max clique n=8 l=2": clique,
    }


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = ["numba", "numpy"] if _accel.HAVE_NUMBA else ["numpy"]
    todo = cases(np.random.default_rng(args.seed))
    print(f"{'kernel':<24}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in todo.items():
        times, results = [], []
        for b in backends:
            old = _accel.set_backend(b)
            try:
                results.append(fn())  # warm-up, compiles under numba
                times.append(timed(fn, args.repeat))
            finally:
                _accel.set_backend(old)
        if len(results) == 2 and results[0] != results[1]:
            raise SystemExit(f"{name}: backends disagree")
        row = f"{name:<24}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()

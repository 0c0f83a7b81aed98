"""Compare the numba and numpy implementations of the Pauli kernels.

Usage: python benchmarks/bench_kernels.py [--repeat 5] [--max-qubits 6]
"""

import argparse
import timeit

import numpy as np

from hypomix import _kernels


def random_terms(n, k, rng):
    xs = rng.integers(0, 2 ** n, size=k).astype(np.int64)
    zs = rng.integers(0, 2 ** n, size=k).astype(np.int64)
    return xs, zs, rng.normal(size=k) + 1j * rng.normal(size=k)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--max-qubits", type=int, default=6)
    p.add_argument("--terms", type=int, default=32)
    args = p.parse_args(argv)
    if not _kernels.HAVE_NUMBA:
        print("numba is not available (or disabled); nothing to compare")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':24s} {'n':>2s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s}")
    for n in range(1, args.max_qubits + 1):
        xs, zs, cs = random_terms(n, args.terms, rng)
        a = rng.normal(size=(2 ** n,) * 2) + 1j * rng.normal(size=(2 ** n,) * 2)
        for name, (fast, slow) in _kernels.KERNELS.items():
            if name == "commutator_superop" and n > 5:
                continue  # 4096 x 4096 dense output dominates both timings
            call = (a, n) if name == "pauli_coefficients" else (n, xs, zs, cs)
            fast(*call)  # compile outside the timing loop
            tf = min(timeit.repeat(lambda: fast(*call), number=1, repeat=args.repeat))
            ts = min(timeit.repeat(lambda: slow(*call), number=1, repeat=args.repeat))
            print(f"{name:24s} {n:2d} {tf * 1e3:11.3f} {ts * 1e3:11.3f} {ts / tf:8.1f}")


if __name__ == "__main__":
    main()

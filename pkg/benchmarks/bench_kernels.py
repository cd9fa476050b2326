"""Time the compiled and numpy backends on the two sampling kernels.

    python benchmarks/bench_kernels.py [--paths N] [--steps N] [--repeat R]
"""
import argparse
import timeit

import numpy as np

from reflectwalk import _kernels
from reflectwalk.core import WalkParams
from reflectwalk.order import MonotoneCoupling


def bench(label, fn, repeat):
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"{label:<40s} {best * 1e3:9.1f} ms")
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=20_000)
    ap.add_argument("--steps", type=int, default=1000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    z = rng.standard_normal((args.paths, args.steps))
    drifts = np.array([0.0, 0.5, 1.0, 2.0]) / np.sqrt(args.steps)
    scale = 1 / np.sqrt(args.steps)

    coupling = MonotoneCoupling(WalkParams.bernoulli("V", "2/5"), WalkParams.bernoulli("V", "3/10"), 20)
    coupling.sample(1, 0)
    tables = [t for pair in coupling._tables for t in pair]
    u = rng.random((args.paths * 5, 20))

    backends = _kernels.available_backends()
    print(f"backends: {', '.join(backends)}  (default: {_kernels.BACKEND})")
    timings = {}
    for name in backends:
        timings[name] = (
            bench(f"walk_functionals [{name}] {args.paths}x{args.steps}x4",
                  lambda: _kernels.walk_functionals(z, drifts, scale, backend=name), args.repeat),
            bench(f"coupled_paths    [{name}] {u.shape[0]}x20",
                  lambda: _kernels.coupled_paths(u, *tables, 1, 1, backend=name), args.repeat),
        )
    if "cython" in timings:
        speed = [p / c for p, c in zip(timings["python"], timings["cython"])]
        print(f"speedup walk_functionals x{speed[0]:.1f}, coupled_paths x{speed[1]:.1f}")


if __name__ == "__main__":
    main()

"""Timing of the grid-sup kernel: compiled extension against the NumPy fallback.

Run with ``python3 benchmarks/bench_gridsup.py [--repeat R]``.  Both backends
get identical inputs; the script also reports their largest disagreement.
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from hodgelab.torus import TorusGeometry, random_form
from hodgelab.torus.kernels import available_backends
from hodgelab.torus.operators import c1_norms

CASES = [(2, 2, 1), (2, 4, 2), (2, 6, 4), (3, 1, 1)]


def _inputs(n, K, band, count, seed=0):
    rng = np.random.Generator(np.random.PCG64(seed))
    g = TorusGeometry(n=n, K=K, oversample=2)
    return [random_form(g, 0, 1, "tangent", rng, band=band) for _ in range(count)]


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--forms", type=int, default=4)
    args = parser.parse_args()
    backends = available_backends()
    print(f"backends: {', '.join(sorted(backends))}")
    print(f"{'n':>2} {'K':>3} {'band':>4} " + " ".join(f"{b + ' ms':>12}" for b in sorted(backends))
          + f" {'speedup':>8} {'max diff':>10}")
    for n, K, band in CASES:
        forms = _inputs(n, K, band, args.forms)
        times, values = {}, {}
        for name in sorted(backends):
            values[name] = c1_norms(forms, backend=name)
            t = timeit.repeat(lambda: c1_norms(forms, backend=name), number=1, repeat=args.repeat)
            times[name] = 1e3 * min(t)
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        diff = max(abs(values[a] - values["python"]).max() for a in values)
        print(f"{n:>2} {K:>3} {band:>4} " + " ".join(f"{times[b]:>12.2f}" for b in sorted(backends))
              + f" {speed:>8.2f} {diff:>10.2e}")


if __name__ == "__main__":
    main()

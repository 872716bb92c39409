"""Compare the numba and numpy backends of the quadrature kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--level 40]

Prints one JSON line per (kernel, backend) with the best wall time and the
maximum deviation from the numpy result.
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from sbo import _kernels
from sbo.harmonics import embed_real, real_basis
from sbo.quadrature import funk_hecke_apply, sphere_grid


def _best(fn, repeat: int) -> tuple[float, object]:
    out = fn()  # warm-up (includes JIT compilation for numba)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--level", type=int, default=40)
    args = ap.parse_args()

    grid = sphere_grid(4, args.level)
    psi = embed_real(real_basis(3, 4)[0], 8)
    exps, coeffs = psi._arrays
    values = np.random.default_rng(0).normal(size=len(grid))
    y = np.array([0.6, 0.8, 0.0])

    cases = {
        "poly_eval": lambda b: _kernels.poly_eval(exps, coeffs, grid.nodes, b),
        "weighted_sum": lambda b: _kernels.weighted_sum(values, grid.weights, b),
        "funk_hecke_apply": lambda b: funk_hecke_apply(4, 0.2, 0.1, psi, y, backend=b).value,
    }
    for name, fn in cases.items():
        ref = None
        for backend in ("numpy",) + tuple(b for b in _kernels.BACKENDS if b != "numpy"):
            t, out = _best(lambda: fn(backend), args.repeat)
            arr = np.atleast_1d(np.asarray(out, dtype=float))
            if ref is None:
                ref = arr
            dev = float(np.max(np.abs(arr - ref))) if arr.size else 0.0
            print(json.dumps({"kernel": name, "backend": backend, "points": len(grid), "seconds": t, "max_dev_vs_numpy": dev}))


if __name__ == "__main__":
    main()

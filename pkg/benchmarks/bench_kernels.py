"""Time the chip-firing reduction backends on batches of effective divisors.

    python benchmarks/bench_kernels.py [--refine 4] [--degree 3] [--repeat 3]

The numba backend is compiled once before timing.  Set TROPAUT_NUMBA=0 to
check that the package imports and runs without it (the numba row is then
skipped).
"""

from __future__ import annotations

import argparse
import time
from fractions import Fraction

import numpy as np

from tropaut import _kernels
from tropaut.lattice import Lattice
from tropaut.samples import k4, theta


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--refine", type=int, default=4, help="lattice step 1/N on unit edges")
    ap.add_argument("--degree", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = ["loops", "numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    print(f"{'graph':8} {'points':>6} {'batch':>7} " + " ".join(f"{b:>10}" for b in backends))
    for name, model in (("theta", theta()), ("K4", k4())):
        lat = Lattice(model, Fraction(1, args.refine))
        batch = lat.effective(args.degree)
        # shift one chip to a negative so the solvency phase is exercised too
        batch = batch.copy()
        batch[:, -1] -= args.degree
        if "numba" in backends:
            lat.reduce_batch(batch[:2], backend="numba")
        results = {}
        times = []
        for b in backends:
            t, out = _best(lambda: lat.reduce_batch(batch, backend=b), args.repeat)
            results[b] = out
            times.append(t)
        ref = results["numpy"]
        for b, (red, scr) in results.items():
            assert np.array_equal(red, ref[0]), f"{b} disagrees with numpy"
            assert np.array_equal(batch - scr @ lat.laplacian.T, red), f"{b}: script does not reproduce"
        print(f"{name:8} {len(lat):>6} {len(batch):>7} " + " ".join(f"{t * 1e3:>8.1f}ms" for t in times))


if __name__ == "__main__":
    main()

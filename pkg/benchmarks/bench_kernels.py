"""Compare the compiled and numpy kernels on the hot loops.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import math
import timeit

import numpy as np

from isomass import _kernels_py

try:
    from isomass import _kernels as _compiled
except ImportError:
    _compiled = None


def cases(impl):
    z = np.linspace(1.0, 4 * math.pi, 512)
    out = np.empty_like(z)

    def weps_grid():
        if impl is _kernels_py:
            impl.weps_values(0.134727, z, 1000)
        else:
            impl.weps_values(0.134727, z, 1000, out)

    return {
        "mr_branch_integral n=1000": lambda: impl.weps_one(0.1, 9.0, 1000),
        "mr_branch_integral n=100000": lambda: impl.weps_one(0.1, 9.0, 100000),
        "weps grid 512 x 1000": weps_grid,
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    impls = [("python", _kernels_py)] + ([("cython", _compiled)] if _compiled else [])
    if _compiled is None:
        print("compiled kernels not available; timing the numpy fallback only")
    results = {}
    for name, impl in impls:
        for label, fn in cases(impl).items():
            number = 1 if "grid" in label else 20
            best = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
            results.setdefault(label, {})[name] = best
    print(f"{'case':32s} {'python':>12s} {'cython':>12s} {'speedup':>8s}")
    for label, t in results.items():
        py, cy = t["python"], t.get("cython")
        cy_s = f"{cy * 1e3:10.3f}ms" if cy else f"{'-':>12s}"
        sp = f"{py / cy:8.1f}" if cy else f"{'-':>8s}"
        print(f"{label:32s} {py * 1e3:10.3f}ms {cy_s} {sp}")


if __name__ == "__main__":
    main()

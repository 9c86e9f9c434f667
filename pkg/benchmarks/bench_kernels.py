"""Timing comparison of the numba kernels against the pure-numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--npts 65536] [--repeats 5]

With numba importable (the default install) both paths are timed in one
process; under DDT7_NO_NUMBA=1 only the fallback exists, so only it is
reported.  Results are best-of-N wall times on seeded random batches.
"""

import argparse
import time

import numpy as np

from ddt7 import kernels, tables
from ddt7.exalg import blades


def best_of(fn, repeats: int) -> float:
    fn()  # warm up (JIT compile, page in)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def build_cases(npts: int, seed: int):
    rng = np.random.default_rng(seed)
    ii, jj, oo, ss = tables.wedge_arrays(7, 2, 2)
    A = rng.normal(size=(npts, 21))
    B = rng.normal(size=(npts, 21))
    tgt, sgn = tables.hodge_arrays(7, 2)
    mats = rng.integers(-9, 10, size=(npts // 8, 7, 14)).astype(np.int64)
    dim4 = len(blades(7, 4))
    return {
        "wedge 2^2 (npts x 21)": lambda impl: impl[0](A, B, ii, jj, oo, ss, dim4),
        "hodge deg 2 (npts x 21)": lambda impl: impl[1](A, tgt, sgn, 21),
        "bareiss ranks (npts/8 x 7x14)": lambda impl: impl[2](mats),
    }


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--npts", type=int, default=65536)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    impls = {"numpy": (kernels.wedge_fields_np, kernels.hodge_fields_np,
                       kernels.bareiss_ranks_np)}
    if kernels.NUMBA_ACTIVE:
        impls["numba"] = (kernels.wedge_fields_nb, kernels.hodge_fields_nb,
                          kernels.bareiss_ranks_nb)
    else:
        print("numba backend inactive (DDT7_NO_NUMBA set or numba missing); "
              "timing the fallback only")

    cases = build_cases(args.npts, args.seed)
    width = max(len(name) for name in cases)
    header = f"{'case':<{width}}  " + "  ".join(f"{n:>10}" for n in impls)
    if len(impls) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    for name, run in cases.items():
        times = {n: best_of(lambda impl=impl: run(impl), args.repeats)
                 for n, impl in impls.items()}
        row = f"{name:<{width}}  " + "  ".join(f"{t * 1e3:9.2f}ms"
                                               for t in times.values())
        if len(impls) == 2:
            row += f"  {times['numpy'] / times['numba']:7.1f}x"
        print(row)

    # agreement spot check while everything is in memory
    if kernels.NUMBA_ACTIVE:
        rng = np.random.default_rng(args.seed)
        mats = rng.integers(-9, 10, size=(64, 7, 14)).astype(np.int64)
        assert np.array_equal(kernels.bareiss_ranks_nb(mats),
                              kernels.bareiss_ranks_np(mats))
        print("backend agreement: ok")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py --simul-N 1000 10000 --gauss-N 50 100

Both backends are run on the same inputs; the survivor sets must agree
and the script exits non-zero when they do not.
"""
from __future__ import annotations

import argparse
import math
import sys
import time

import numpy as np

from mcrsapprox import kernels
from mcrsapprox.approx3d import REL_MARGIN, SimulTarget, _abs_margin
from mcrsapprox.operators import OPERATORS


def _timed(fn, repeat):
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b) -> bool:
    ka = sorted(map(tuple, a[0].tolist()))
    kb = sorted(map(tuple, b[0].tolist()))
    return ka == kb and math.isclose(a[2], b[2], rel_tol=1e-12, abs_tol=0.0)


def bench_simul(name, N, mode):
    beta, gamma = SimulTarget.from_operator(OPERATORS[name]).floats()
    absm = _abs_margin(beta, gamma)
    shells = range(1, N + 1)

    def run(backend):
        return kernels.simul_scan(beta, gamma, shells, mode, math.inf, rel=REL_MARGIN,
                                  absm=absm, backend=backend)
    return run


def bench_gauss(N):
    # conjugate pair with slopes (1 +- i)/2: s = 1/2, r = 1/2, u = 1
    shells = np.arange(1, N + 1)

    def run(backend):
        return kernels.gauss_scan(N, shells, 0.5, 0.5, 1.0, 1.0, backend=backend)
    return run


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--simul-N", type=int, nargs="+", default=[1000, 10000])
    ap.add_argument("--gauss-N", type=int, nargs="+", default=[50, 100])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    try:
        kernels.backend_module("cython")
    except ImportError:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`")
        return 2

    cases = []
    for N in args.simul_N:
        for name in ("B", "E1"):
            cases.append((f"simul {name} records", N, bench_simul(name, N, 1)))
        cases.append(("simul B single", N, bench_simul("B", N, 0)))
    for N in args.gauss_N:
        cases.append(("gauss pair", N, bench_gauss(N)))

    print(f"{'kernel':<20}{'N':>8}{'cython s':>12}{'python s':>12}{'speedup':>10}  agree")
    failed = False
    for label, N, run in cases:
        tc, rc = _timed(lambda: run("cython"), args.repeat)
        tp, rp = _timed(lambda: run("python"), args.repeat)
        ok = _same(rc, rp)
        failed |= not ok
        print(f"{label:<20}{N:>8}{tc:>12.4f}{tp:>12.4f}{tp / max(tc, 1e-9):>10.1f}  {'yes' if ok else 'NO'}", flush=True)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

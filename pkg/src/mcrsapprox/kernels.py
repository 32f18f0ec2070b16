"""Kernel selection: the compiled extension when it is importable, the
pure-Python module otherwise.  Set ``MCRS_PURE_PYTHON=1`` to force the
fallback."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if os.environ.get("MCRS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def backend_module(name: str | None = None):
    if name is None:
        return _impl
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


def _stripes(shells, threads: int) -> list[np.ndarray]:
    shells = np.asarray(shells, dtype=np.int64)
    threads = max(1, min(threads, len(shells) or 1))
    return [shells[t::threads] for t in range(threads)]


def _merge(parts, width):
    rows = [p[0] for p in parts if len(p[0])]
    vals = [p[1] for p in parts if len(p[1])]
    bound = min(p[2] for p in parts)
    if not rows:
        return np.empty((0, width), dtype=np.int64), np.empty(0), bound
    return np.concatenate(rows), np.concatenate(vals), bound


def _run(fn, stripes, threads):
    if threads <= 1 or len(stripes) == 1:
        return [fn(s) for s in stripes]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, stripes))


def gauss_scan(N, shells, s, r, u, R0, rel=1e-9, absm=0.0, threads=1, backend=None):
    """Conjugate-pair candidate scan, split over threads by striding the
    shells.  Each thread prunes with its own running bound, so the
    survivor set depends on the thread count but always contains every
    candidate within the margins of the global minimum."""
    impl = backend_module(backend)
    stripes = _stripes(shells, threads)
    parts = _run(lambda st: impl.gauss_scan(int(N), st, float(s), float(r), float(u),
                                            float(R0), float(rel), float(absm)),
                 stripes, threads)
    return _merge(parts, 4)


def simul_scan(beta, gamma, shells, mode, B0, thr_sizes=(), thr_vals=(),
               rel=1e-9, absm=0.0, threads=1, backend=None):
    impl = backend_module(backend)
    stripes = _stripes(shells, threads)
    tsz = np.asarray(thr_sizes, dtype=np.int64)
    tval = np.asarray(thr_vals, dtype=np.float64)
    parts = _run(lambda st: impl.simul_scan(float(beta), float(gamma), st, int(mode), float(B0),
                                            tsz, tval, float(rel), float(absm)),
                 stripes, threads)
    return _merge(parts, 3)

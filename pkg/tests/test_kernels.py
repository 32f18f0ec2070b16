import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcrsapprox import kernels

pytest.importorskip("mcrsapprox._kernels")


def _rows(result):
    return sorted(map(tuple, result[0].tolist()))


@settings(max_examples=25)
@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(1, 120), st.sampled_from([0, 1]))
def test_simul_scan_backends_agree(beta, gamma, N, mode):
    args = (beta, gamma, range(1, N + 1), mode, math.inf)
    c = kernels.simul_scan(*args, backend="cython")
    p = kernels.simul_scan(*args, backend="python")
    assert _rows(c) == _rows(p)
    assert np.allclose(sorted(c[1]), sorted(p[1]), rtol=1e-12, atol=0)


@settings(max_examples=10)
@given(st.floats(0.1, 2), st.floats(-2, 2), st.floats(0.2, 2), st.integers(1, 25))
def test_gauss_scan_backends_agree(s, r, u, N):
    shells = np.arange(1, N + 1)
    c = kernels.gauss_scan(N, shells, s, r, u, 0.5, backend="cython")
    p = kernels.gauss_scan(N, shells, s, r, u, 0.5, backend="python")
    assert _rows(c) == _rows(p)


@pytest.mark.parametrize("threads", [2, 3, 8])
def test_striped_scan_keeps_the_minimum(threads):
    single = kernels.simul_scan(0.5698, 0.7549, range(1, 3000), 0, math.inf)
    multi = kernels.simul_scan(0.5698, 0.7549, range(1, 3000), 0, math.inf, threads=threads)
    best = min(single[1])
    assert min(multi[1]) == best
    keep = {r for r, v in zip(map(tuple, single[0].tolist()), single[1]) if v == best}
    assert keep <= set(map(tuple, multi[0].tolist()))


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.backend_module("fortran")

from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mcrsapprox import regression
from mcrsapprox.approx3d import (Claim, NonCommutingGenerators, OrbitFamily, SimulCandidate,
                                 SimulTarget, VerticalCandidate, best_simul, best_simul_records,
                                 discrepancy3, mat_inverse, mat_mul, mat_pow, rate_probe,
                                 records_csv, verify_table)
from mcrsapprox.numeric import context, set_precision
from mcrsapprox.operators import OPERATORS
from mcrsapprox.serialize import dumps

B, E1, E2 = OPERATORS["B"], OPERATORS["E1"], OPERATORS["E2"]


@pytest.fixture(scope="module")
def b_target():
    return SimulTarget.from_operator(B)


@pytest.fixture(scope="module")
def e1_target():
    return SimulTarget.from_operator(E1)


def brute_best(t, N):
    best, ties = None, []
    for a in range(1, N + 1):
        for b in range(-N, N + 1):
            for c in range(-N, N + 1):
                if gcd(gcd(a, b), c) != 1:
                    continue
                rho = discrepancy3(t, (a, b, c))
                k = 1 if best is None else rho.cmp(best)
                if best is None or k < 0:
                    best, ties = rho, [(a, b, c)]
                elif k == 0:
                    ties.append((a, b, c))
    return best, sorted(ties, key=lambda v: SimulCandidate(v).sort_key())


@pytest.mark.parametrize("name", ["B", "E1"])
@pytest.mark.parametrize("N", [1, 2, 3, 5])
def test_best_simul_matches_exhaustive_search(name, N):
    t = SimulTarget.from_operator(OPERATORS[name])
    rho, ties = brute_best(t, N)
    res = best_simul(t, N)
    assert res.rho.cmp(rho) == 0
    assert res.vectors() == ties


@settings(max_examples=15)
@given(st.integers(1, 9), st.integers(-12, 12), st.integers(-12, 12), st.integers(1, 4))
def test_best_simul_on_rational_targets(a, b, c, N):
    t = SimulTarget((a, b, c))
    rho, ties = brute_best(t, N)
    res = best_simul(t, N)
    assert res.rho.cmp(rho) == 0 and res.vectors() == ties


def test_candidate_normalisation():
    assert SimulCandidate.of((-2, -4, 6)).vector == (1, 2, -3)
    assert SimulCandidate.of((3, 1, 1)) == SimulCandidate.of((-3, -1, -1))
    with pytest.raises(VerticalCandidate):
        SimulCandidate.of((0, 1, 2))


def test_discrepancy_is_sign_invariant(b_target):
    for v in [(3, 2, 2), (7, 4, 5), (16, 9, 12)]:
        neg = tuple(-x for x in v)
        assert discrepancy3(b_target, v).cmp(discrepancy3(b_target, neg)) == 0


def test_result_independent_of_precision(e1_target):
    bits, top = context.bits, context.max_bits
    try:
        results = []
        for p in (64, 128, 256):
            set_precision(p, 32 * p)
            t = SimulTarget.from_operator(E1)
            results.append(best_simul(t, 300).vectors())
    finally:
        set_precision(bits, top)
    assert results[0] == results[1] == results[2] == [(227, 182, 101)]


def test_b_records_start(b_target):
    records = best_simul_records(b_target, 30)
    assert [r.candidates[0].vector for r in records][:6] == [
        (1, 1, 1), (2, 1, 2), (3, 2, 2), (4, 2, 3), (5, 3, 4), (7, 4, 5)]
    # B^5 (1,0,0) = (2,1,1) is never a best approximation
    assert all(SimulCandidate((2, 1, 1)) not in r.candidates for r in records)


def test_e1_records_start(e1_target):
    records = best_simul_records(e1_target, 40)
    assert [r.candidates[0].vector for r in records] == [
        (1, 1, 0), (2, 2, 1), (3, 2, 1), (4, 3, 2), (5, 4, 2), (9, 7, 4), (11, 9, 5),
        (16, 13, 7), (20, 16, 9), (36, 29, 16)]


def test_records_agree_with_single_bounds(b_target):
    records = best_simul_records(b_target, 200)
    for N in (1, 7, 30, 113, 200):
        best = max((r for r in records if r.size <= N), key=lambda r: r.size)
        assert best_simul(b_target, N).rho.cmp(best.rho) == 0


def test_minimizers_reverify(b_target):
    res = best_simul(b_target, 500)
    claims = [Claim(str(i), c.vector) for i, c in enumerate(res.candidates)]
    report = verify_table(b_target, None, res.candidates[-1].size, claims)
    assert all(r.verdict == "confirmed" for r in report.rows)


def test_rate_probe_window(b_target, e1_target):
    for t, lo, hi in ((b_target, 0.7, 1.0), (e1_target, 0.55, 0.7)):
        report = rate_probe(best_simul_records(t, 10 ** 4), [10 ** 2, 10 ** 3, 10 ** 4])
        w_lo, w_hi = report.window
        assert lo < w_lo <= w_hi < hi


def test_operator_algebra():
    assert mat_mul(E1, E2) == mat_mul(E2, E1)
    ident = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    e1_minus_id = tuple(tuple(E1[i][j] - ident[i][j] for j in range(3)) for i in range(3))
    assert mat_inverse(e1_minus_id) == E2
    assert mat_pow(E1, 2) == OPERATORS["golden2d"]
    assert mat_mul(mat_pow(B, -3), mat_pow(B, 3)) == ident


def test_non_commuting_generators():
    with pytest.raises(NonCommutingGenerators):
        OrbitFamily((B, E1), (1, 0, 0), ((0, 2), (0, 2)))


def test_orbit_vectors():
    fam = regression.golden_family()
    assert fam.vector((0, 0)) == (1, 0, 0)
    assert fam.vector((3, 1)) == (5, 4, 2)
    assert fam.vector((11, 0)) == (4004, 3211, 1782)
    assert regression.b_family().vector((4,)) == (1, 1, 1)


def test_b_table_prefix(b_target):
    fam = regression.b_family()
    report = verify_table(b_target, fam, 10 ** 4, regression.b_claims(fam))
    assert report.verdict == "confirmed"
    sizes = [r.candidate.size for r in report.rows if r.verdict == "confirmed"]
    assert sizes == sorted(sizes) and sizes[-1] <= 10 ** 4


def test_corrupted_row_is_refuted(b_target):
    fam = regression.b_family()
    claims = regression.b_claims(fam)
    bad = claims[:5] + [Claim("bad", (12, 7, 8))] + claims[5:]
    report = verify_table(b_target, fam, 10 ** 3, bad)
    (row,) = [r for r in report.rows if r.label == "bad"]
    assert row.verdict.startswith("refuted")
    assert row.counterexample is not None
    assert discrepancy3(b_target, row.counterexample).cmp(row.rho) < 0
    assert report.verdict == "refuted"


def test_dropped_row_is_reported_missing(b_target):
    fam = regression.b_family()
    claims = [c for c in regression.b_claims(fam) if c.vector != (16, 9, 12)]
    report = verify_table(b_target, fam, 10 ** 3, claims)
    assert report.verdict == "refuted"
    (missing,) = report.missing
    assert missing["vector"] == "(16,9,12)" and missing["kind"] == "improvement"


def test_records_csv_labels_orbit(b_target):
    fam = regression.b_family()
    text = records_csv(best_simul_records(b_target, 20), fam, 20)
    lines = text.strip().splitlines()
    assert lines[0] == "i,n,a,b,c,size,rho"
    assert lines[1].startswith("1,4,1,1,1,1,")


@pytest.mark.parametrize("threads", [1, 4, 8])
def test_thread_count_does_not_change_output(e1_target, threads):
    base = dumps(best_simul(e1_target, 2000, threads=1).to_json())
    assert dumps(best_simul(e1_target, 2000, threads=threads).to_json()) == base

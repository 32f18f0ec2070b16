from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from mcrsapprox.approx2d import (ApproxQuery, EpsilonTooLarge, OracleCapExceeded,
                                 best_approx, brute_force_best, brute_force_table,
                                 complex_delta_bounds, delta_bound_from_eps,
                                 eps_bound_from_delta, fast_cf_denominators, fast_cf_group,
                                 fast_cf_terms, lagrange_sweep, phi_over_q2_bound,
                                 sail_level_of_result, slope_radius)
from mcrsapprox.mcrs import MCRSGroup, discrepancy, group_from_matrix, md_form
from mcrsapprox.numeric import QuadraticSurd, compare, sign
from mcrsapprox.operators import OPERATORS

THETA = QuadraticSurd(1, 1, 2, 5)
FIB = group_from_matrix(OPERATORS["fibonacci"])
ANTISAIL = MCRSGroup.from_vectors([(1, 2), (2, 3)])

slopes = st.fractions(min_value=-4, max_value=4, max_denominator=12)
small_eps = st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(1, 4), max_denominator=1000)


def same_result(a, b) -> bool:
    return a.keys == b.keys and a.rho.cmp(b.rho) == 0


def _difference_branch(a1, a2, b1, b2):
    """max |coefficient| of Phi_a - Phi_b for real slope pairs."""
    fa = md_form(MCRSGroup.from_slopes(a1, a2))
    fb = md_form(MCRSGroup.from_slopes(b1, b2))
    # fix the sign so that the y^2 coefficients agree in sign
    ya, yb = fa.coeffs[-1][1].re, fb.coeffs[-1][1].re
    if (ya > 0) != (yb > 0):
        fb = -fb
    return max(abs((ca - cb).re) for (_, ca), (_, cb) in zip(fa.coeffs, fb.coeffs))


@given(slopes, slopes, st.fractions(-1, 1, max_denominator=40), st.fractions(-1, 1, max_denominator=40),
       small_eps)
def test_slope_radius_is_sound(a1, a2, t1, t2, scale):
    assume(a1 != a2)
    b1, b2 = a1 + t1 * scale, a2 + t2 * scale
    assume(b1 != b2)
    eps = _difference_branch(a1, a2, b1, b2)
    d = abs(a1 - a2)
    assume(eps * d < 1 and eps > 0)
    assert abs(b1 - a1) <= slope_radius(a1, d, eps)
    assert abs(b2 - a2) <= slope_radius(a2, d, eps)


@given(slopes, slopes, small_eps, st.fractions(-1, 1, max_denominator=50),
       st.fractions(-1, 1, max_denominator=50))
def test_sound_perturbation_bound(a1, a2, eps, t1, t2):
    d = abs(a1 - a2)
    assume(d > 2 * eps)
    b1, b2 = a1 + t1 * eps, a2 + t2 * eps
    assume(b1 != b2)
    rho = discrepancy(MCRSGroup.from_slopes(a1, a2), MCRSGroup.from_slopes(b1, b2)).value
    assert compare(rho, eps_bound_from_delta(a1, a2, eps, "sound")) <= 0


def test_displayed_perturbation_bound_can_be_exceeded():
    a1, a2, eps = Fraction(0), Fraction(1), Fraction(1, 10)
    shift = Fraction(99, 1000)
    rho = discrepancy(MCRSGroup.from_slopes(a1, a2),
                      MCRSGroup.from_slopes(a1 - shift, a2 - shift)).value
    assert rho == Fraction(99, 500)
    assert eps_bound_from_delta(a1, a2, eps) == Fraction(1, 6) < rho
    assert rho <= eps_bound_from_delta(a1, a2, eps, "sound") == Fraction(1, 4)


def test_bound_domains():
    with pytest.raises(EpsilonTooLarge):
        slope_radius(Fraction(1), Fraction(2), Fraction(1, 2))
    with pytest.raises(EpsilonTooLarge):
        eps_bound_from_delta(Fraction(0), Fraction(1), Fraction(1, 2), "sound")
    with pytest.raises(ValueError):
        delta_bound_from_eps(Fraction(0), Fraction(1), Fraction(1, 10))
    with pytest.raises(EpsilonTooLarge):
        complex_delta_bounds(Fraction(0), Fraction(1), Fraction(1, 4))


@given(st.integers(1, 2000), st.integers(-3, 3), st.sampled_from([1, 2]))
def test_phi_over_q2_lower_bound_on_fibonacci(n, offset, side):
    a = THETA if side == 1 else -1 / THETA
    m = round(float(a) * n) + offset
    eps3 = Fraction(1, 10)
    gap = abs(a - Fraction(m, n))
    assume(compare(gap, eps3) < 0)
    bound = phi_over_q2_bound(THETA, -1 / THETA, eps3, side)
    assert compare(gap, bound.lower_bound(md_form(FIB), m, n)) > 0


def test_antisail_minimizers():
    res = best_approx(ApproxQuery(ANTISAIL, 1))
    assert res.rho.value == 6
    assert res.vectors() == [((0, 1), (1, 0)), ((0, 1), (1, 1)), ((1, -1), (1, 0)), ((1, 0), (1, 1))]


def test_fibonacci_small_bound():
    res = best_approx(ApproxQuery(FIB, 1000))
    assert res.vectors() == [((610, 987), (987, -610))]
    assert res.certificates["method"] == "lemma"


@pytest.mark.parametrize("target", [FIB, ANTISAIL], ids=["fibonacci", "antisail"])
def test_monotone_in_N(target):
    rhos = [best_approx(ApproxQuery(target, N)).rho for N in range(1, 41)]
    assert all(b.cmp(a) <= 0 for a, b in zip(rhos, rhos[1:]))


vectors = st.tuples(st.integers(-6, 6), st.integers(-6, 6)).filter(any)


@given(vectors, vectors, st.integers(1, 8))
def test_search_agrees_with_brute_force_on_rational_targets(v1, v2, N):
    assume(v1[0] * v2[1] != v1[1] * v2[0])
    target = MCRSGroup.from_vectors([v1, v2])
    assume(all(v[0] != 0 for v in (v1, v2)))
    q = ApproxQuery(target, N)
    assert same_result(best_approx(q), brute_force_best(q))


@given(st.fractions(-3, 3, max_denominator=5), st.fractions(Fraction(1, 5), 3, max_denominator=5),
       st.integers(1, 6))
def test_search_agrees_with_brute_force_on_complex_targets(re, im, N):
    q = ApproxQuery(MCRSGroup.complex_pair(re, im), N)
    assert same_result(best_approx(q), brute_force_best(q))


def test_pruned_candidates_are_not_better():
    """Nothing the lemma chain discards beats the certified minimum."""
    table = brute_force_table(FIB, 30)
    for N in (5, 13, 30):
        res = best_approx(ApproxQuery(FIB, N))
        assert res.rho.cmp(table[N].rho) == 0
        assert res.keys == table[N].keys


def test_vertical_target_uses_exhaustive_search():
    target = MCRSGroup.classical(Fraction(2, 5))
    got = [best_approx(ApproxQuery(target, N)).vectors()[0][1] for N in (2, 3, 5)]
    assert got == [(2, 1), (3, 1), (5, 2)]


def test_oracle_cap():
    with pytest.raises(OracleCapExceeded):
        brute_force_best(ApproxQuery(FIB, 61))
    assert brute_force_best(ApproxQuery(FIB, 61), cap=61).vectors() == [((34, 55), (55, -34))]


def test_lagrange_window_fibonacci():
    report = lagrange_sweep(FIB, [10, 100, 1000])
    lo, hi = report.window
    assert 0 < lo <= hi < 1
    assert report.fitted_exponent() == pytest.approx(2.0, abs=0.15)


def test_sail_levels_of_minimizers():
    res = best_approx(ApproxQuery(FIB, 10 ** 6))
    (entry,) = sail_level_of_result(FIB, res)
    assert entry["levels"] == [1, 1]
    assert all(level <= cap for level, cap in zip(entry["levels"], entry["caps"]))
    anti = sail_level_of_result(ANTISAIL, best_approx(ApproxQuery(ANTISAIL, 1)))
    assert all(min(e["levels"]) > 1 for e in anti)


def test_fast_cf_number():
    terms = fast_cf_terms(2, 7)
    dens = fast_cf_denominators(2, 7)
    assert terms[:2] == [1, 1]
    # each term is the previous convergent denominator (M = 2)
    assert all(a == n for a, n in zip(terms[2:], dens[1:]))
    assert all(b == a * n + p for a, n, p, b in zip(terms[2:], dens[1:], dens, dens[2:]))
    G = fast_cf_group(2)
    assert G.spectrum_tag == "hyperbolic"


def test_complex_pair_result_is_gaussian():
    half = QuadraticSurd(0, 1, 2, 2)
    res = best_approx(ApproxQuery(MCRSGroup.complex_pair(half, half), 20))
    assert res.rho.value == QuadraticSurd(17, -12, 24, 2)
    assert len(res.keys) == 2
    assert sign(res.rho.value) > 0

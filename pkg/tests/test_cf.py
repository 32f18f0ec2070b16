from fractions import Fraction
from itertools import islice

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcrsapprox.cf import (best_dioph_in_box, cf_expand, cf_terms, classical_best_sequence,
                           convergents, evaluate)
from mcrsapprox.mcrs import MCRSGroup, discrepancy, size
from mcrsapprox.numeric import QuadraticSurd, compare

PHI = QuadraticSurd(1, 1, 2, 5)
rationals = st.fractions(min_value=-50, max_value=50, max_denominator=300)
surds = st.builds(QuadraticSurd, st.integers(-20, 20), st.integers(1, 6), st.integers(1, 9),
                  st.sampled_from([2, 3, 5, 6, 7, 10, 13]))


def _box_scan(x, N):
    """Closest m/n with |m|, n <= N; ties go to the smaller denominator."""
    best = None
    for n in range(1, N + 1):
        for m in range(-N, N + 1):
            err = abs(x - Fraction(m, n))
            if best is None or compare(err, best[0]) < 0:
                best = (err, Fraction(m, n))
    return best[1]


def test_golden_expansion():
    assert cf_expand(PHI, 5).terms[:5] == (1, 1, 1, 1, 1)
    assert str(cf_expand(PHI)) == "[(1)]"
    assert str(cf_expand(QuadraticSurd.sqrt(7))) == "[2; (1 1 1 4)]"


def test_finite_expansion():
    c = cf_expand(Fraction(2, 5))
    assert c.kind == "finite" and c.terms == (0, 2, 2)
    assert evaluate(c.terms) == Fraction(2, 5)


@given(rationals)
def test_rational_round_trip(x):
    assert evaluate(cf_expand(x, 200).terms) == x


@given(surds)
def test_periodic_round_trip(x):
    c = cf_expand(x)
    assert c.kind == "periodic"
    # the purely periodic tail y satisfies y = [period; y]
    period = list(c.period)
    y_terms = list(islice(cf_terms(x), len(c.preperiod), len(c.preperiod) + 4 * len(period)))
    assert y_terms == period * 4
    assert c.terms[:len(c.preperiod)] == c.preperiod


@given(st.one_of(rationals, surds))
def test_convergent_determinants(x):
    terms = list(islice(cf_terms(x), 25))
    conv = list(convergents(terms))
    for prev, cur in zip(conv, conv[1:]):
        assert abs(cur.m * prev.n - prev.m * cur.n) == 1


@given(surds)
def test_convergent_error_bound(x):
    conv = list(convergents(list(islice(cf_terms(x), 15))))
    for cur, nxt in zip(conv, conv[1:]):
        err = abs(x - Fraction(cur.m, cur.n))
        assert compare(err, Fraction(1, cur.n * nxt.n)) < 0


def test_best_in_box_golden():
    best, nxt = best_dioph_in_box(PHI, 100)
    assert str(best) == "89/55"
    assert (nxt.m, nxt.n) == (144, 89)


@given(st.one_of(rationals, surds), st.integers(1, 40))
def test_best_in_box_matches_scan(x, N):
    best, _ = best_dioph_in_box(x, N)
    assert Fraction(best.m, best.n) == _box_scan(x, N)


@pytest.mark.parametrize("x,N", [(Fraction(355, 113), 200), (QuadraticSurd.sqrt(2), 200),
                                 (QuadraticSurd(-7, 3, 4, 11), 150), (Fraction(-199, 3), 60)])
def test_best_in_box_larger_boxes(x, N):
    best, _ = best_dioph_in_box(x, N)
    assert Fraction(best.m, best.n) == _box_scan(x, N)


def test_box_binds_numerator():
    # 7/1 is out of the 5-box even though its denominator is fine
    best, _ = best_dioph_in_box(Fraction(7), 5)
    assert (best.m, best.n) == (5, 1)


def test_classical_sequence_examples():
    seq = classical_best_sequence(Fraction(2, 5))
    assert [(c.m, c.n) for c in seq] == [(1, 2), (2, 5), (1, 3)]
    assert [(c.m, c.n) for c in classical_best_sequence(0)] == [(0, 1)]
    irr = classical_best_sequence(1 / (PHI * PHI), max_terms=6)
    assert [(c.m, c.n) for c in irr] == [(1, 2), (1, 3), (2, 5), (3, 8), (5, 13), (8, 21)]


@pytest.mark.parametrize("alpha", [Fraction(2, 5), Fraction(9, 20), Fraction(7, 16)])
def test_classical_sequence_entries_are_best(alpha):
    target = MCRSGroup.classical(alpha)
    for c in classical_best_sequence(alpha):
        group = MCRSGroup.classical(c.value)
        N = size(group)
        rho = discrepancy(target, group)
        for n in range(1, N + 1):
            for m in range(-N, N + 1):
                other = MCRSGroup.classical(Fraction(m, n))
                if size(other) <= N:
                    assert compare(rho.squared, discrepancy(target, other).squared) <= 0


def test_classical_sequence_domain():
    with pytest.raises(ValueError):
        classical_best_sequence(Fraction(3, 2))

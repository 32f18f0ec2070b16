from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcrsapprox.approx3d import SimulTarget, chart_branches, discrepancy3
from mcrsapprox.mcrs import (MCRSGroup, NotRegular, charpoly, discrepancy, group_from_matrix,
                             markoff_minimum, md_form, md_form_from_directions, md_form_simul3,
                             simul3_group, size)
from mcrsapprox.numeric import CNum, QuadraticSurd, compare, sign
from mcrsapprox.operators import OPERATORS

FIB = OPERATORS["fibonacci"]
SQRT5_INV = QuadraticSurd(0, 1, 5, 5)

ints = st.integers(-12, 12)
nonzero = ints.filter(bool)


def _cnum_eq(a: CNum, b: CNum) -> bool:
    return compare(a.re, b.re) == 0 and compare(a.im, b.im) == 0


def same_form(f, g) -> bool:
    """Equal up to a global sign."""
    pairs = list(zip(f.coeffs, g.coeffs))
    if any(e1 != e2 for (e1, _), (e2, _) in pairs):
        return False
    return (all(_cnum_eq(c1, c2) for (_, c1), (_, c2) in pairs)
            or all(_cnum_eq(c1, -c2) for (_, c1), (_, c2) in pairs))


def test_antisail_form_and_size():
    A = MCRSGroup.from_vectors([(1, 2), (2, 3)])
    f = md_form(A)
    assert [str(c) for _, c in f.coeffs] == ["6", "-7", "2"]
    assert size(A) == 3


def test_fibonacci_form():
    f = md_form(group_from_matrix(FIB))
    # Phi = (x^2 + x y - y^2) / sqrt 5 up to sign
    expected = [Fraction(1), Fraction(1), Fraction(-1)]
    ratio = [c.re / f.coeffs[0][1].re for _, c in f.coeffs]
    assert all(compare(r, e) == 0 for r, e in zip(ratio, expected))
    assert compare(abs(f.coeffs[0][1].re), SQRT5_INV) == 0


def test_charpoly_and_regularity():
    assert charpoly(FIB) == (1, -1, -1)
    assert charpoly(OPERATORS["B"]) == (1, 0, -1, -1)
    with pytest.raises(NotRegular):
        group_from_matrix(((1, 0), (0, 1)))


@given(st.lists(st.tuples(ints, ints).filter(any), min_size=2, max_size=2),
       st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=7).filter(bool),
                min_size=2, max_size=2))
def test_form_is_scale_independent(dirs, scales):
    if dirs[0][0] * dirs[1][1] == dirs[0][1] * dirs[1][0]:
        return
    scaled = [tuple(s * x for x in d) for d, s in zip(dirs, scales)]
    assert same_form(md_form_from_directions(dirs), md_form_from_directions(scaled))


SL2 = [((1, 1), (0, 1)), ((2, 1), (1, 1)), ((1, 0), (3, 1)), ((5, 2), (2, 1)), ((0, -1), (1, 0))]


def _inv(g):
    (a, b), (c, d) = g
    return ((d, -b), (-c, a))


def _mul(p, q):
    return tuple(tuple(sum(p[i][k] * q[k][j] for k in range(2)) for j in range(2)) for i in range(2))


@pytest.mark.parametrize("g", SL2)
def test_unimodular_equivariance(g):
    A = group_from_matrix(FIB)
    gA = group_from_matrix(_mul(_mul(g, FIB), _inv(g)))
    f, fg = md_form(A), md_form(gA)
    for v in [(1, 0), (0, 1), (2, -3), (5, 8), (-7, 4)]:
        gv = tuple(g[i][0] * v[0] + g[i][1] * v[1] for i in range(2))
        lhs = fg.evaluate(tuple(CNum(x) for x in gv))
        rhs = f.evaluate(tuple(CNum(x) for x in v))
        assert _cnum_eq(lhs, rhs) or _cnum_eq(lhs, -rhs)
    assert compare(markoff_minimum(gA), SQRT5_INV) == 0


def test_fibonacci_markoff_minimum_by_brute_force():
    alpha = markoff_minimum(group_from_matrix(FIB))
    assert compare(alpha, SQRT5_INV) == 0
    # |m^2 + m n - n^2| >= 1 on every nonzero point of the 1000 box
    brute = min(abs(m * m + m * n - n * n) for m in range(-1000, 1001, 7)
                for n in range(-1000, 1001, 3) if m or n)
    assert brute == 1


@pytest.mark.parametrize("vecs", [[(1, 2), (2, 3)], [(1, 3), (2, -1)], [(3, 4), (5, 7)]])
def test_rational_markoff_minimum_matches_box_scan(vecs):
    # the minimum is taken off the eigenlines, where the form does not vanish
    A = MCRSGroup.from_vectors(vecs)
    f = md_form(A)
    values = (abs(f.evaluate((CNum(x), CNum(y))).re) for x in range(-40, 41) for y in range(-40, 41))
    brute = min(v for v in values if v)
    assert markoff_minimum(A) == brute


@given(st.lists(st.tuples(ints, ints).filter(any), min_size=4, max_size=4))
def test_discrepancy_symmetric_and_zero_on_diagonal(vecs):
    a, b, c, d = vecs
    if a[0] * b[1] == a[1] * b[0] or c[0] * d[1] == c[1] * d[0]:
        return
    A, B = MCRSGroup.from_vectors([a, b]), MCRSGroup.from_vectors([c, d])
    assert compare(discrepancy(A, B).squared, discrepancy(B, A).squared) == 0
    assert sign(discrepancy(A, A).squared) == 0


def test_complex_example_discrepancy_is_sqrt5_over_2():
    Ai = MCRSGroup.from_vectors([(1, (0, 1)), (1, (0, -1))])
    Aii = MCRSGroup.from_vectors([(1, 2), (1, -2)])
    rho = discrepancy(Ai, Aii)
    assert compare(rho.squared, Fraction(5, 4)) == 0


@given(st.integers(1, 15), ints, ints)
def test_simul_form_agrees_with_general_form(a, b, c):
    assert same_form(md_form_simul3(a, b, c), md_form(simul3_group(a, b, c)))


def _three_terms(t, c):
    b, g = Fraction(t[1], t[0]), Fraction(t[2], t[0])
    b2, g2 = Fraction(c[1], c[0]), Fraction(c[2], c[0])
    return [abs(b - b2), abs(g - g2), abs((b * b + g * g) - (b2 * b2 + g2 * g2)) / 2]


@pytest.mark.parametrize("seed", range(10))
def test_discrepancy3_difference_branch_is_the_three_term_formula(seed):
    import random
    rng = random.Random(seed)
    for _ in range(50):
        t = (rng.randint(1, 40), rng.randint(-40, 40), rng.randint(-40, 40))
        c = (rng.randint(1, 40), rng.randint(-40, 40), rng.randint(-40, 40))
        diff = [ci - cj for (_, ci), (_, cj) in zip(md_form_simul3(*t).coeffs,
                                                       md_form_simul3(*c).coeffs)]
        moduli = sorted((abs(x.im) for x in diff if not x.is_zero()), reverse=True)
        terms = sorted((x for x in _three_terms(t, c) if x), reverse=True)
        assert moduli == terms
        D, S = chart_branches(*_three_terms_inputs(t, c))
        assert D == max(_three_terms(t, c))
        rho = discrepancy3(SimulTarget(t), c)
        assert compare(rho.value, min(D, S)) == 0


def _three_terms_inputs(t, c):
    return (Fraction(t[1], t[0]), Fraction(t[2], t[0]), Fraction(c[1], c[0]), Fraction(c[2], c[0]))

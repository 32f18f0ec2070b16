"""Every reference value, recomputed and compared at its printed precision.

Three printed values disagree with the computation in their last digit
(xi-B, v-B, worked-phi1).  Those tests fail by design: the computed value is
what the library returns, and the comparison is not loosened to hide it.
"""
from fractions import Fraction

import pytest

from mcrsapprox.numeric import CNum, QuadraticSurd, compare, real_sqrt
from mcrsapprox.mcrs import group_from_matrix
from mcrsapprox.operators import OPERATORS
from mcrsapprox.regression import (CONFIRMED, DOCUMENTED, REFUTED, ceil2, check_discrepancy_ex2,
                                   check_ids, fibonacci_worked_bounds, run_checks)


@pytest.fixture(scope="module")
def all_checks():
    return {c.id: c for c in run_checks()}


def test_ids_are_unique_and_all_run(all_checks):
    ids = check_ids()
    assert len(ids) == len(set(ids))
    assert set(all_checks) == set(ids)


@pytest.mark.parametrize("check_id", check_ids())
def test_reference_value_reproduced(all_checks, check_id):
    chk = all_checks[check_id]
    assert chk.ok, f"{check_id}: printed {chk.paper!r}, computed {chk.computed!r}"


def test_known_mismatches_are_exactly_three(all_checks):
    refuted = sorted(c.id for c in all_checks.values() if c.verdict == REFUTED)
    assert refuted == ["v-B", "worked-phi1", "xi-B"]


def _dominant_real(name):
    G = group_from_matrix(OPERATORS[name])
    return max((e for e in G.eigenvalues if not isinstance(e, CNum)), key=lambda e: abs(float(e)))


def test_plastic_number_ball_contains_printed_digits():
    # 1.3247179573 printed; the real root of x^3 = x + 1 is 1.32471795724474...
    lo, hi = _dominant_real("B").enclosure(40)
    printed = Fraction("1.3247179573")
    assert lo <= printed <= hi, (float(lo), float(hi))


def test_plastic_number_true_digits():
    xi = _dominant_real("B")
    assert abs(float(xi) ** 3 - float(xi) - 1) < 1e-14
    lo, hi = xi.enclosure(60)
    assert Fraction("1.32471795724") < lo <= hi < Fraction("1.32471795725")


def test_worked_phi1_rounds_to_printed():
    bounds = fibonacci_worked_bounds()
    assert ceil2(bounds["phi1"]) == Fraction("80.65")


def test_worked_constants_confirmed():
    bounds = fibonacci_worked_bounds()
    assert ceil2(bounds["delta1"]) == Fraction("80.35")
    assert ceil2(bounds["delta2"]) == Fraction("18.97")
    assert ceil2(bounds["phi2"]) == Fraction("18.99")
    assert ceil2(bounds["rho"]) == Fraction("3.79")


def test_elliptic_hyperbolic_discrepancy_is_pinned():
    chk = check_discrepancy_ex2()
    assert chk.verdict == DOCUMENTED
    assert chk.ok
    assert chk.paper == "sqrt3/2"
    assert chk.details["expected_computed"] == "sqrt5/2"
    # the larger branch is sqrt(1 + 1/4); sqrt(3)/2 would need sqrt(1 - 1/4)
    assert compare(real_sqrt(Fraction(5, 4)), QuadraticSurd.sqrt(5) / 2) == 0


def test_unknown_id_raises():
    with pytest.raises(KeyError):
        run_checks(only="no-such-check")


def test_prefix_selects_group():
    assert [c.id for c in run_checks(only="antisail")] == ["antisail"]
    got = [c.id for c in run_checks(only="antisail-")]
    assert got == ["antisail-discrepancy", "antisail-sail", "antisail-cf", "antisail-levels"]
    assert all(c.verdict == CONFIRMED for c in run_checks(only="form"))


def test_json_shape():
    (chk,) = run_checks(only="discrepancy-ex2")
    js = chk.to_json()
    assert set(js) == {"id", "description", "paper", "computed", "verdict", "details"}

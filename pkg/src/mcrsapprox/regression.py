"""Reference values, recomputed.

Each check recomputes one reference number or list and compares it with
the printed value.  A check either confirms, refutes, or reports a known
divergence whose computed value is itself pinned (so it still fails if the
computation ever changes).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .approx2d import (ApproxQuery, best_approx, best_approx_hyperbolic, delta_bound_from_eps,
                       eps_bound_from_delta, lagrange_sweep, phi_over_q2_bound)
from .approx3d import (Claim, OrbitFamily, SimulCandidate, SimulTarget, best_simul_records,
                       claims_from_family, discrepancy3, verify_table)
from .mcrs import (MCRSGroup, discrepancy, group_from_matrix, md_form, md_form_simul3,
                   size)
from .numeric import (CNum, QuadraticSurd, compare, format_real, real_ceil, real_sqrt,
                      simplify)
from .operators import OPERATORS
from .sails2d import Cone2, geometric_cf, sail, sail_membership_level

CONFIRMED = "confirmed"
REFUTED = "refuted"
DOCUMENTED = "diverges-from-paper (documented)"
UNDECIDED = "undecided-at-precision"

THETA = QuadraticSurd(1, 1, 2, 5)
SQRT5 = QuadraticSurd.sqrt(5)

# exponents (m, n) of E1^m E2^n (1,0,0), indexed as printed (index 3 is A3)
GOLDEN_TABLE = [
    (1, 1, 1), (2, 2, 1), (4, 3, 2), (5, 3, 1), (6, 4, 2), (7, 4, 1), (8, 5, 3), (9, 5, 2),
    (10, 6, 3), (11, 6, 2), (12, 6, 1), (13, 7, 3), (14, 7, 2), (15, 8, 3), (16, 8, 2),
    (17, 9, 4), (18, 9, 3), (19, 10, 4), (20, 10, 3), (21, 11, 5), (22, 11, 4), (23, 11, 3),
    (24, 12, 4), (25, 12, 3), (26, 13, 5), (27, 13, 4), (28, 14, 5), (29, 14, 4), (30, 15, 6),
    (31, 15, 5), (32, 15, 4), (33, 16, 5), (34, 16, 4), (35, 17, 6), (36, 17, 5), (37, 18, 6),
    (38, 18, 5), (39, 19, 7), (40, 19, 6), (41, 19, 5),
]
GOLDEN_EXTRA = (3, 2, 1)
B_EXPONENTS = [4] + list(range(6, 53))


@dataclass
class Check:
    id: str
    description: str
    paper: str
    computed: str
    verdict: str
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict in (CONFIRMED, DOCUMENTED)

    def to_json(self) -> dict:
        out = {"id": self.id, "description": self.description, "paper": self.paper,
               "computed": self.computed, "verdict": self.verdict}
        if self.details:
            out["details"] = self.details
        return out


def _verdict(ok: bool) -> str:
    return CONFIRMED if ok else REFUTED


def ceil2(x) -> Fraction:
    """Smallest 2-decimal number not below x (printed bounds round up)."""
    return Fraction(real_ceil(x * 100), 100)


def _dec2(x: Fraction) -> str:
    return f"{float(x):.2f}"


def _near(x, printed: str) -> bool:
    """x agrees with the printed decimal to its last digit."""
    digits = len(printed.split(".")[1]) if "." in printed else 0
    half = Fraction(1, 2 * 10 ** digits)
    return compare(abs(x - Fraction(printed)), half) <= 0


def _same_form(form, expected: dict) -> bool:
    """Equal up to a global sign; ``expected`` maps exponents to CNum."""
    vals = [(e, c) for e, c in form.coeffs]
    for s in (1, -1):
        if all((c - s * CNum.coerce(expected.get(e, 0))).is_zero() for e, c in vals):
            return True
    return False


# ---------------------------------------------------------------------------
# plane checks

def check_eigenvalues() -> list[Check]:
    out = []
    for name, printed, vec in (("B", "1.3247179573", ("1", "0.5698402911", "0.7548776662")),
                               ("E1", "2.2469796037", ("2.2469796037", "1.8019377358", "1"))):
        G = group_from_matrix(OPERATORS[name])
        xi = max((e for e in G.eigenvalues if not isinstance(e, CNum)), key=lambda e: abs(float(e)))
        out.append(Check(f"xi-{name}", f"dominant real eigenvalue of {name}", printed,
                         format_real(xi, 14), _verdict(_near(xi, printed))))
        t = SimulTarget.from_operator(OPERATORS[name])
        a, b, c = (t.direction[0], t.direction[1], t.direction[2])
        if vec[-1] == "1":
            comps = [simplify(a / c), simplify(b / c), 1]
        else:
            comps = [1, t.beta, t.gamma]
        ok = all(_near(x, p) for x, p in zip(comps, vec))
        out.append(Check(f"v-{name}", f"eigendirection of {name}", " ".join(vec),
                         " ".join(format_real(x, 14) for x in comps), _verdict(ok)))
    return out


def check_fibonacci_lines() -> Check:
    G = group_from_matrix(((1, 1), (1, 0)))
    slopes = sorted((simplify(s.re) for s in G.slopes()), key=float)
    expected = [-THETA, simplify(1 / THETA)]
    ok = all(compare(x, y) == 0 for x, y in zip(slopes, expected))
    return Check("fibonacci-eigenlines", "eigenlines of [[1,1],[1,0]]", "y = -theta x, y = x/theta",
                 ", ".join(f"y = {s} x" for s in slopes), _verdict(ok))


def check_ex2_vectors() -> Check:
    G = group_from_matrix(((0, -1), (1, 0)))
    dirs = sorted((str(l.gaussian) for l in G.lines))
    want = MCRSGroup.from_vectors([((0, 1), 1), ((0, -1), 1)])
    ok = sorted(str(l.gaussian) for l in want.lines) == dirs
    return Check("ex2-eigenvectors", "eigenvectors of [[0,-1],[1,0]]", "(I,1), (-I,1)",
                 " ".join(dirs), _verdict(ok))


def check_forms() -> list[Check]:
    out = []
    fib = md_form(group_from_matrix(((1, 1), (1, 0))))
    r = simplify(1 / SQRT5)
    ok = _same_form(fib, {(2, 0): -r, (1, 1): r, (0, 2): r})
    out.append(Check("fibonacci-form", "form of the Fibonacci group", "(-x^2+xy+y^2)/sqrt5",
                     str(fib.to_json()["coefficients"]), _verdict(ok)))
    hyp = md_form(MCRSGroup.from_vectors([(1, 2), (1, -2)]))
    ok = _same_form(hyp, {(2, 0): -1, (0, 2): Fraction(1, 4)})
    out.append(Check("form-12-1m2", "form of the group of (1,2),(1,-2)", "(y^2-4x^2)/4",
                     str(hyp.to_json()["coefficients"]), _verdict(ok)))
    ell = md_form(group_from_matrix(((0, -1), (1, 0))))
    half_i = CNum(0, Fraction(1, 2))
    ok = _same_form(ell, {(2, 0): half_i, (0, 2): half_i})
    out.append(Check("form-ex2", "form of the group of (I,1),(-I,1)", "I(x^2+y^2)/2",
                     str(ell.to_json()["coefficients"]), _verdict(ok)))
    for vec, want, printed in (((1, 0, 0), {(1, 2, 0): CNum(0, Fraction(-1, 2)),
                                            (1, 0, 2): CNum(0, Fraction(-1, 2))},
                                "I(-xy^2/2 - xz^2/2)"),
                               ((1, 1, 1), {(3, 0, 0): CNum(0, -1), (2, 1, 0): CNum(0, 1),
                                            (2, 0, 1): CNum(0, 1), (1, 2, 0): CNum(0, Fraction(-1, 2)),
                                            (1, 0, 2): CNum(0, Fraction(-1, 2))},
                                "I(-x^3 + x^2y + x^2z - xy^2/2 - xz^2/2)")):
        f = md_form_simul3(*vec)
        ok = _same_form(f, want)
        out.append(Check("simul-form-%d%d%d" % vec, f"form of A[{vec}]", printed,
                         str(f.to_json()["coefficients"]), _verdict(ok)))
    return out


def check_sizes() -> list[Check]:
    ell = size(group_from_matrix(((0, -1), (1, 0))))
    hyp = size(MCRSGroup.from_vectors([(1, 2), (1, -2)]))
    out = [Check("sizes-ex", "sizes of the two example groups", "1 and 2", f"{ell} and {hyp}",
                 _verdict(ell == 1 and hyp == 2))]
    fracs = [Fraction(0), Fraction(1), Fraction(3, 7), Fraction(5, 8), Fraction(13, 21)]
    got = [size(MCRSGroup.classical(f)) for f in fracs]
    out.append(Check("size-classical", "size of A[m/n] equals n", "n",
                     " ".join(f"{f}:{s}" for f, s in zip(fracs, got)),
                     _verdict(all(s == f.denominator for f, s in zip(fracs, got)))))
    pairs = [(Fraction(1, 3), Fraction(1, 2)), (THETA - 1, Fraction(3, 5)), (Fraction(1), Fraction(2, 9))]
    ok = True
    shown = []
    for a1, a2 in pairs:
        rho = discrepancy(MCRSGroup.classical(a1), MCRSGroup.classical(a2)).value
        ok &= compare(rho, abs(a1 - a2)) == 0
        shown.append(format_real(rho, 12))
    out.append(Check("rho-classical", "discrepancy of A[a1], A[a2] equals |a1 - a2|", "|a1 - a2|",
                     " ".join(shown), _verdict(ok)))
    return out


def check_discrepancy_ex2() -> Check:
    ell = group_from_matrix(((0, -1), (1, 0)))
    hyp = MCRSGroup.from_vectors([(1, 2), (1, -2)])
    rho = discrepancy(ell, hyp)
    expected = real_sqrt(Fraction(5, 4))
    # both branches: max |I/2 -+ 1| over the coefficients
    branch_values = []
    fe, fh = md_form(ell), md_form(hyp)
    for s in (1, -1):
        vals = [(c1 - s * c2).modulus() for (_, c1), (_, c2) in zip(fe.coeffs, fh.coeffs)]
        best = vals[0]
        for v in vals[1:]:
            if compare(v, best) > 0:
                best = v
        branch_values.append(format_real(best, 12))
    pinned = compare(rho.value, expected) == 0
    return Check("discrepancy-ex2", "discrepancy between I(x^2+y^2)/2 and (y^2-4x^2)/4 groups",
                 "sqrt3/2", f"{format_real(rho.value, 12)} (sqrt5/2)",
                 DOCUMENTED if pinned else REFUTED,
                 {"branches": branch_values, "expected_computed": "sqrt5/2"})


def check_antisail() -> list[Check]:
    A = MCRSGroup.from_vectors([(1, 2), (2, 3)])
    near = MCRSGroup.from_vectors([(1, 0), (1, 1)])
    rho = discrepancy(A, near).value
    out = [Check("antisail-discrepancy", "discrepancy to the group of (1,0),(1,1)", "6",
                 format_real(rho), _verdict(rho == 6))]
    res = best_approx(ApproxQuery(A, 1))
    want = sorted([((0, 1), (1, 0)), ((0, 1), (1, 1)), ((1, -1), (1, 0)), ((1, 0), (1, 1))])
    got = sorted(tuple(sorted(p)) for p in res.vectors())
    ok = got == want and res.rho.value == 6
    out.append(Check("antisail", "best approximations of size 1", "4 minimizers, rho = 6",
                     f"{len(got)} minimizers {got}, rho = {format_real(res.rho.value)}", _verdict(ok)))
    s = sail(Cone2.of((1, 2), (2, 3)), 10)
    verts = sorted(tuple(v) for v in s.vertices)
    out.append(Check("antisail-sail", "sail of the cone (1,2),(2,3), box 10", "(1,2) (2,3)",
                     " ".join(map(str, verts)), _verdict(verts == [(1, 2), (2, 3)])))
    union = sorted({tuple(v) for p in geometric_cf(A, 1, 10) for v in p.vertices})
    want_u = sorted([(1, 2), (2, 3), (-1, -2), (-2, -3)])
    out.append(Check("antisail-cf", "integer points of the geometric continued fraction",
                     "(1,2) (2,3) (-1,-2) (-2,-3)", " ".join(map(str, union)), _verdict(union == want_u)))
    levels = {v: sail_membership_level(A, v) for v in [(1, 0), (1, 1), (0, 1), (1, -1)]}
    out.append(Check("antisail-levels", "minimizer vectors are off the sail", "not on the sail",
                     " ".join(f"{v}:{k}" for v, k in levels.items()),
                     _verdict(all(k > 1 for k in levels.values()))))
    return out


# ---------------------------------------------------------------------------
# the Fibonacci worked example

def fibonacci_worked_bounds() -> dict:
    """Constants of the worked example as functions of N >= 100, each
    multiplied by N^2 and evaluated at the worst case N = 100."""
    a1, a2 = THETA, simplify(-1 / THETA)
    eps2 = Fraction(1, 55 * 89)
    step2 = simplify(eps_bound_from_delta(a1, a2, eps2) / eps2 * Fraction(89, 55) ** 3)
    scale = 100 ** 2
    d1, d2 = delta_bound_from_eps(a1, a2, Fraction(379, 100) / scale)
    step3 = (simplify(d1 * scale), simplify(d2 * scale))
    caps = (phi_over_q2_bound(a1, a2, Fraction(8035, 100) / scale, 1).phi_cap(),
            phi_over_q2_bound(a1, a2, Fraction(1897, 100) / scale, 2).phi_cap())
    step4 = tuple(simplify(c * scale) for c in caps)
    return {"rho": step2, "delta1": step3[0], "delta2": step3[1], "phi1": step4[0], "phi2": step4[1]}


def check_worked_example() -> list[Check]:
    vals = fibonacci_worked_bounds()
    printed = {"rho": "3.79", "delta1": "80.35", "delta2": "18.97", "phi1": "80.65", "phi2": "18.99"}
    out = []
    for key, p in printed.items():
        c = ceil2(vals[key])
        out.append(Check(f"worked-{key}", f"worked-example bound {key} times N^2", p,
                         f"{format_real(vals[key], 8)} -> {_dec2(c)}",
                         _verdict(c == Fraction(p))))
    return out


def check_fibonacci_million() -> Check:
    G = group_from_matrix(OPERATORS["fibonacci"])
    res = best_approx_hyperbolic(ApproxQuery(G, 10 ** 6))
    want = [((514229, 832040), (832040, -514229))]
    got = [tuple(sorted(p)) for p in res.vectors()]
    return Check("fibonacci-1e6", "best approximation at N = 10^6",
                 "F29 y - F30 x = 0, F30 y + F29 x = 0", str(got), _verdict(got == want))


def check_lagrange(threads: int = 1) -> list[Check]:
    out = []
    Ns = [10, 100, 1000, 10000]
    targets = (("fibonacci", group_from_matrix(OPERATORS["fibonacci"])),
               ("complex", MCRSGroup.complex_pair(QuadraticSurd(0, 1, 2, 2), QuadraticSurd(0, 1, 2, 2))))
    for name, G in targets:
        rep = lagrange_sweep(G, Ns, threads=threads)
        lo, hi = rep.window
        ok = lo > 0 and hi / lo < 1e3
        out.append(Check(f"lagrange-{name}", "rho_N N^2 stays in a bounded window",
                         "C1 < rho_N N^2 < C2", f"[{lo:.4f}, {hi:.4f}]", _verdict(ok)))
    return out


# ---------------------------------------------------------------------------
# space

def b_family(max_exp: int = 80) -> OrbitFamily:
    B = OPERATORS["B"]
    return OrbitFamily((B,), (1, 0, 0), ((0, max_exp),), ("n",), source=B)


def golden_family(max_m: int = 30, max_n: int = 15) -> OrbitFamily:
    return OrbitFamily((OPERATORS["E1"], OPERATORS["E2"]), (1, 0, 0), ((0, max_m), (0, max_n)),
                       ("m", "n"), source=OPERATORS["golden2d"])


def b_claims(f: OrbitFamily) -> list[Claim]:
    return claims_from_family(f, [(str(i), (n,)) for i, n in enumerate(B_EXPONENTS, 1)])


def golden_claims(f: OrbitFamily) -> list[Claim]:
    rows = claims_from_family(f, [(str(i), (m, n)) for i, m, n in GOLDEN_TABLE])
    return rows + [Claim("A3", GOLDEN_EXTRA)]


def check_simul_examples() -> list[Check]:
    t = SimulTarget((1, 0, 0))
    rho = discrepancy3(t, SimulCandidate.of((1, 0, 1)))
    out = [Check("discrepancy3-example", "discrepancy of (1,0,0) and (1,0,1)", "1",
                 format_real(rho.value), _verdict(rho.value == 1))]
    v = b_family().vector((4,))
    out.append(Check("b-orbit-n4", "B^4 (1,0,0)", "first element", str(v),
                     _verdict(v == (1, 1, 1))))
    v = golden_family().vector((1, 1))
    out.append(Check("golden-orbit-11", "E1 E2 (1,0,0)", "first table entry", str(v),
                     _verdict(v == (1, 1, 0))))
    return out


def check_b_sequence(N: int = 10 ** 6, threads: int = 1) -> Check:
    f = b_family()
    t = SimulTarget.from_operator(OPERATORS["B"])
    claims = b_claims(f)
    rep = verify_table(t, f, N, claims, threads=threads)
    n5 = SimulCandidate.of(f.vector((5,)))
    in_range = len(claims) - len(rep.beyond_bound)
    details = {"rows_within_bound": in_range, "n5": str(n5),
               "n5_is_best": any(r.candidate == n5 for r in rep.rows) or
               any(m["vector"] == str(n5) for m in rep.missing),
               "report": rep.to_json()}
    computed = f"{rep.verdict}: {in_range} rows within N = {N}, missing {len(rep.missing)}"
    ok = rep.verdict == "confirmed" and (N < 10 ** 6 or in_range == 48)
    return Check("b-sequence", "best approximations B^n (1,0,0), n = 4 or 6..52",
                 "48 elements up to 10^6", computed,
                 UNDECIDED if rep.verdict == UNDECIDED else _verdict(ok), details)


def check_golden_table(N: int = 10 ** 6, threads: int = 1) -> Check:
    f = golden_family()
    t = SimulTarget.from_operator(OPERATORS["E1"])
    claims = golden_claims(f)
    rep = verify_table(t, f, N, claims, threads=threads)
    in_range = len(claims) - len(rep.beyond_bound)
    computed = f"{rep.verdict}: {in_range} rows within N = {N}, missing {len(rep.missing)}"
    ok = rep.verdict == "confirmed" and (N < 10 ** 6 or in_range == 41)
    return Check("golden3d-table", "table of E1^m E2^n (1,0,0) plus A3", "40 elements plus A3",
                 computed, UNDECIDED if rep.verdict == UNDECIDED else _verdict(ok),
                 {"report": rep.to_json()})


def check_golden_search(N: int = 1000, threads: int = 1) -> Check:
    f = golden_family()
    t = SimulTarget.from_operator(OPERATORS["E1"])
    records = best_simul_records(t, N, threads=threads)
    found = [c.vector for r in records for c in r.candidates]
    want = sorted((SimulCandidate.of(c.vector) for c in golden_claims(f)),
                  key=SimulCandidate.sort_key)
    want = [c.vector for c in want if c.size <= N]
    return Check("golden3d-search", f"search reproduces the table up to size {N}",
                 "table rows plus A3", f"{len(found)} records", _verdict(found == want))


def check_b_search(N: int = 10 ** 4, threads: int = 1) -> Check:
    f = b_family()
    t = SimulTarget.from_operator(OPERATORS["B"])
    records = best_simul_records(t, N, threads=threads)
    found = [c.vector for r in records for c in r.candidates]
    want = [c.vector for c in sorted((SimulCandidate.of(f.vector((n,))) for n in B_EXPONENTS),
                                     key=SimulCandidate.sort_key) if c.size <= N]
    return Check("b-search", f"search reproduces the B sequence up to size {N}",
                 "B^n (1,0,0), n = 4 or n >= 6", f"{len(found)} records", _verdict(found == want))


# ---------------------------------------------------------------------------

def run_checks(only: str | None = None, N: int | None = None, threads: int = 1) -> list[Check]:
    """All checks, or the one named ``only`` (or every id starting with it)."""
    table_N = 10 ** 6 if N is None else N
    groups: list[Callable[[], list[Check]]] = [
        check_eigenvalues,
        lambda: [check_fibonacci_lines(), check_ex2_vectors()],
        check_forms,
        check_sizes,
        lambda: [check_discrepancy_ex2()],
        check_antisail,
        check_worked_example,
        lambda: [check_fibonacci_million()],
        lambda: check_lagrange(threads),
        check_simul_examples,
        lambda: [check_b_search(min(table_N, 10 ** 4), threads)],
        lambda: [check_b_sequence(table_N, threads)],
        lambda: [check_golden_search(min(table_N, 1000), threads)],
        lambda: [check_golden_table(table_N, threads)],
    ]
    ids = check_ids()
    if only is None:
        wanted = set(ids)
    elif only in ids:
        wanted = {only}
    else:
        wanted = {i for i in ids if i.startswith(only)}
        if not wanted:
            raise KeyError(only)
    out = []
    for g, members in zip(groups, _GROUP_IDS):
        if wanted.isdisjoint(members):
            continue
        out.extend(chk for chk in g() if chk.id in wanted)
    return out


_GROUP_IDS = [
    ["xi-B", "v-B", "xi-E1", "v-E1"],
    ["fibonacci-eigenlines", "ex2-eigenvectors"],
    ["fibonacci-form", "form-12-1m2", "form-ex2", "simul-form-100", "simul-form-111"],
    ["sizes-ex", "size-classical", "rho-classical"],
    ["discrepancy-ex2"],
    ["antisail-discrepancy", "antisail", "antisail-sail", "antisail-cf", "antisail-levels"],
    ["worked-rho", "worked-delta1", "worked-delta2", "worked-phi1", "worked-phi2"],
    ["fibonacci-1e6"],
    ["lagrange-fibonacci", "lagrange-complex"],
    ["discrepancy3-example", "b-orbit-n4", "golden-orbit-11"],
    ["b-search"],
    ["b-sequence"],
    ["golden3d-search"],
    ["golden3d-table"],
]


def check_ids() -> list[str]:
    return [i for g in _GROUP_IDS for i in g]

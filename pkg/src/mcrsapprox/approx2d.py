"""Best rational approximation of plane MCRS-groups.

The search is exact: float arithmetic only ever shrinks a candidate list
that is then re-evaluated with exact discrepancies, and every pruning step
is backed by a bound recorded in the result's certificate.

Candidates range over the whole rational class of the plane: pairs of real
rational lines and conjugate pairs of Gaussian lines.  The two classes are
separated by a simple fact: the form of a conjugate pair has purely
imaginary coefficients while the form of a real pair has real ones, so the
discrepancy between groups of different classes is at least the largest
coefficient modulus of either form.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .cf import best_dioph_in_box, convergents, cf_terms
from .mcrs import (DiscrepancyValue, EigenLine, MCRSGroup, MDForm, NotRational,
                   form_discrepancy, markoff_minimum, md_form, monomials,
                   size_squared)
from .numeric import (BallReal, CNum, GaussianVector, PrecisionExhausted,
                      compare, format_real, gaussian_primitive, rational_above,
                      rational_below, real_ceil, real_floor, real_sqrt, sign,
                      rdiv, simplify)

DEFAULT_ORACLE_CAP = 60


class EpsilonTooLarge(ValueError):
    def __init__(self, detail: str = ""):
        super().__init__("epsilon too large" + (f": {detail}" if detail else ""))


class UseClassicalChart(ValueError):
    def __init__(self):
        super().__init__("use classical chart: an eigenline is vertical (x = 0)")


class NotComplexPair(ValueError):
    def __init__(self):
        super().__init__("not complex-pair")


class OracleCapExceeded(ValueError):
    def __init__(self, N: int, cap: int):
        super().__init__(f"N = {N} exceeds the exhaustive-search cap {cap}")


class UndecidedTie(PrecisionExhausted):
    """Two candidates whose discrepancies could not be separated."""

    def __init__(self, first, second):
        super().__init__(f"tie undecidable at max precision between {first} and {second}")
        self.candidates = (first, second)


# ---------------------------------------------------------------------------
# bounds

def _abs(x):
    return simplify(abs(x))


def delta_bound_from_eps(alpha1, alpha2, eps1):
    """Slope confinement displayed for the hyperbolic case.

    Returns ``((1+|a1|) d^2 eps / (|a2| (1 - eps d)), (1+|a2|) d^2 eps / (|a1| (1 - eps d)))``
    with ``d = |a1 - a2|``.  This is the classical closed form; the search
    itself uses :func:`slope_radius`, whose derivation is self-contained.
    """
    d = _abs(alpha1 - alpha2)
    if sign(d) == 0:
        raise ValueError("coincident slopes")
    if sign(alpha1) == 0 or sign(alpha2) == 0:
        raise ValueError("slope 0 is a pole of the displayed bound")
    if sign(eps1) <= 0:
        raise ValueError("epsilon must be positive")
    gap = 1 - eps1 * d
    if sign(gap) <= 0:
        raise EpsilonTooLarge("need eps < 1/|a1 - a2|")
    b1 = simplify((1 + _abs(alpha1)) * d * d / (_abs(alpha2) * gap) * eps1)
    b2 = simplify((1 + _abs(alpha2)) * d * d / (_abs(alpha1) * gap) * eps1)
    return b1, b2


def slope_radius(alpha, d, eps):
    """If a real pair with slopes (b1, b2) has discrepancy <= eps to the
    pair (a1, a2) on its difference branch, then
    ``|b_i - a_i| <= (1/2 + |a_i|) d eps / (1 - eps d)`` with ``d = |a1 - a2|``.

    Derivation: the y^2 and xy coefficients give ``1/d - 1/d' = e2`` and
    ``(a1+a2)/d - (b1+b2)/d' = e1`` with ``|e1|, |e2| <= eps``; subtracting
    ``(a1-a2)/d = (b1-b2)/d' = 1`` gives ``b1 - a1 = d'(a1 e2 - e1/2)`` and
    ``|d'| <= d/(1 - eps d)``.
    """
    gap = 1 - eps * d
    if sign(gap) <= 0:
        raise EpsilonTooLarge("need eps < 1/|a1 - a2|")
    return simplify((Fraction(1, 2) + _abs(alpha)) * d * eps / gap)


def eps_bound_from_delta(alpha1, alpha2, eps2, variant: str = "displayed"):
    """Upper bound for the discrepancy of the pair (a1+d1, a2+d2) when
    ``|d_i| < eps2``.

    ``variant="displayed"`` is the classical closed form
    ``max(2, 2(|a1|+|a2|), a1^2+a2^2+d eps) / (d (d + 2 eps)) * eps``.
    ``variant="sound"`` replaces ``d + 2 eps`` by ``d - 2 eps``: the new slope
    gap can shrink to ``d - 2 eps``, which the displayed form misses (see
    the test-suite counterexample).  Both agree to first order in eps.
    """
    d = _abs(alpha1 - alpha2)
    if sign(eps2) <= 0:
        raise ValueError("epsilon must be positive")
    a1, a2 = _abs(alpha1), _abs(alpha2)
    top = alpha1 * alpha1 + alpha2 * alpha2 + d * eps2
    num = 2
    for cand in (2 * (a1 + a2), top):
        if compare(cand, num) > 0:
            num = cand
    if variant == "displayed":
        den = d * (d + 2 * eps2)
    elif variant == "sound":
        if compare(2 * eps2, d) >= 0:
            raise EpsilonTooLarge("need eps < |a1 - a2|/2")
        den = d * (d - 2 * eps2)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return simplify(num / den * eps2)


@dataclass(frozen=True)
class PhiOverQ2Bound:
    """``|a - m/n| > factor * |Phi(m, n)| / n^2`` whenever ``|a - m/n| < eps3``,
    with ``factor = d/(d + eps3)`` on either side."""

    alpha1: object
    alpha2: object
    eps3: object
    side: int

    @property
    def factor(self):
        d = _abs(self.alpha1 - self.alpha2)
        return simplify(d / (d + self.eps3))

    def phi_cap(self, delta=None):
        """Largest possible ``|Phi(m, n)|/n^2`` given ``|a - m/n| < delta``
        (``delta`` defaults to eps3)."""
        delta = self.eps3 if delta is None else delta
        return simplify(delta / self.factor)

    def lower_bound(self, form: MDForm, m: int, n: int):
        """The displayed lower bound on ``|a_side - m/n|``."""
        val = form.evaluate((CNum(n), CNum(m))).modulus()
        return simplify(self.factor * rdiv(val, n * n))

    def __call__(self, form: MDForm, m: int, n: int):
        return self.lower_bound(form, m, n)


def phi_over_q2_bound(alpha1, alpha2, eps3, side: int = 1) -> PhiOverQ2Bound:
    if side not in (1, 2):
        raise ValueError("side must be 1 or 2")
    if sign(eps3) <= 0:
        raise ValueError("epsilon must be positive")
    return PhiOverQ2Bound(alpha1, alpha2, eps3, side)


def complex_delta_bounds(alpha, beta, eps1):
    """Slope confinement for a conjugate pair y = (alpha +- I beta) x:
    ``2|a-b| b^2 eps / (|a-b| - 2 eps |b|(1+|b|))`` for the real part and
    ``2(1+|b|+|a-b|) b^2 eps / (same)`` for the imaginary part."""
    b = _abs(beta)
    if sign(b) == 0:
        raise NotComplexPair()
    if compare(eps1 * 2 * (1 + b), 1) >= 0:
        raise EpsilonTooLarge("need eps < 1/(2(1+|beta|))")
    amb = _abs(alpha - beta)
    den = amb - 2 * eps1 * b * (1 + b)
    if sign(den) <= 0:
        raise EpsilonTooLarge("denominator |alpha - beta| - 2 eps |beta|(1+|beta|) is not positive")
    d1 = simplify(2 * amb * b * b / den * eps1)
    d2 = simplify(2 * (1 + b + amb) * b * b / den * eps1)
    return d1, d2


def complex_rho_bound(alpha, beta, eps2):
    """Closed-form bound on the discrepancy of a perturbed conjugate pair."""
    b = _abs(beta)
    if sign(b) == 0:
        raise NotComplexPair()
    if sign(eps2) <= 0:
        raise ValueError("epsilon must be positive")
    num = 2
    for cand in (2 * (_abs(alpha) + b), _abs(alpha * alpha - beta * beta) + 2 * _abs(alpha * beta) + 2 * b * eps2):
        if compare(cand, num) > 0:
            num = cand
    return simplify(num / (b * (b + eps2)) * eps2)


def complex_phi_factor(beta, eps3):
    """``|z - a| > 2 beta |Phi(1, a)| / (2 beta + eps3)``: the factor."""
    b = _abs(beta)
    return simplify(2 * b / (2 * b + eps3))


# ---------------------------------------------------------------------------
# fractions in an interval

def _simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """The fraction with least denominator in the closed interval [lo, hi],
    0 <= lo <= hi (it also has the least numerator)."""
    fl = math.floor(lo)
    if fl == lo:
        return Fraction(fl)
    if fl + 1 <= hi:
        return Fraction(fl + 1)
    inner = _simplest_between(1 / (hi - fl), 1 / (lo - fl))
    return fl + 1 / inner


def _positive_fractions(lo: Fraction, hi: Fraction, N: int, out: list) -> None:
    stack = [(lo, hi)]
    while stack:
        lo, hi = stack.pop()
        if lo > hi:
            continue
        f = _simplest_between(lo, hi)
        if f.numerator > N or f.denominator > N:
            continue
        out.append(f)
        gap = Fraction(1, f.denominator * N)
        stack.append((lo, f - gap))
        stack.append((f + gap, hi))


def fractions_in_interval(lo, hi, N: int) -> list[Fraction]:
    """All reduced m/n in [lo, hi] with |m| <= N and 1 <= n <= N, sorted.

    ``lo`` and ``hi`` may be exact reals; they are widened outward to
    rationals first, so the result is a superset of the exact answer
    restricted to the widened interval.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    bits = 2 * N.bit_length() + 4
    lo = rational_below(simplify(lo), bits)
    hi = rational_above(simplify(hi), bits)
    out: list[Fraction] = []
    if lo > hi:
        return out
    if lo <= 0 <= hi:
        out.append(Fraction(0))
    step = Fraction(1, N)
    if hi >= step:
        _positive_fractions(max(lo, step), hi, N, out)
    if lo <= -step:
        neg: list[Fraction] = []
        _positive_fractions(max(-hi, step), -lo, N, neg)
        out.extend(-f for f in neg)
    return sorted(set(out))


# ---------------------------------------------------------------------------
# candidates

Key = tuple  # (coords of line 1, coords of line 2), sorted


def _line(coords) -> GaussianVector:
    return gaussian_primitive(GaussianVector(tuple(coords)))


def real_pair_key(v1: Sequence[int], v2: Sequence[int]) -> Key:
    v1, v2 = (int(v1[0]), int(v1[1])), (int(v2[0]), int(v2[1]))
    l1 = _line(((v1[0], 0), (v1[1], 0))).coords
    l2 = _line(((v2[0], 0), (v2[1], 0))).coords
    if l1 == l2:
        raise ValueError("lines coincide")
    return tuple(sorted((l1, l2)))


def complex_pair_key(g: tuple[int, int], w: tuple[int, int]) -> Key:
    l1 = _line((g, w))
    l2 = _line(l1.conjugate().coords)
    if l1.coords == l2.coords:
        raise ValueError("line is real")
    return tuple(sorted((l1.coords, l2.coords)))


def key_is_real(key: Key) -> bool:
    return all(c[1] == 0 for line in key for c in line)


def key_size_squared(key: Key) -> int:
    return max(a * a + b * b for line in key for a, b in line)


def key_group(key: Key) -> MCRSGroup:
    return MCRSGroup([EigenLine.from_gaussian(GaussianVector(line)) for line in key])


def group_key(A: MCRSGroup) -> Key:
    if not A.is_rational:
        raise NotRational()
    return tuple(sorted(l.gaussian.coords for l in A.lines))


def _real_coeffs(key: Key) -> list[Fraction]:
    (u1, v1), (u2, v2) = [(line[0][0], line[1][0]) for line in key]
    D = u2 * v1 - u1 * v2
    return [Fraction(v1 * v2, D), Fraction(-(u1 * v2 + u2 * v1), D), Fraction(u1 * u2, D)]


def _complex_coeffs(key: Key) -> list[CNum]:
    line = key[0]
    g, w = line
    norm = g[0] * g[0] + g[1] * g[1]
    # slope w/g = w * conj(g) / |g|^2
    re = Fraction(w[0] * g[0] + w[1] * g[1], norm)
    im = Fraction(w[1] * g[0] - w[0] * g[1], norm)
    s = (re * re + im * im) / (2 * im)
    r = re / im
    u = 1 / (2 * im)
    return [CNum(0, -s), CNum(0, r), CNum(0, -u)]


def candidate_form(key: Key) -> MDForm:
    if key_is_real(key):
        coeffs = [CNum(c) for c in _real_coeffs(key)]
    else:
        coeffs = _complex_coeffs(key)
    return MDForm(2, tuple(zip(monomials(2), coeffs)))


def exact_rho(target_form: MDForm, key: Key) -> DiscrepancyValue:
    return form_discrepancy(target_form, candidate_form(key))


# ---------------------------------------------------------------------------
# queries and results

@dataclass(frozen=True)
class ApproxQuery:
    target: MCRSGroup
    N: int
    class_tag: str = "all-rational"

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.target.n != 2:
            raise ValueError("plane queries need a 2-dimensional group")
        if self.class_tag != "all-rational":
            raise ValueError(f"unsupported class {self.class_tag!r}")


@dataclass
class ApproxResult:
    target: MCRSGroup
    N: int
    keys: list
    rho: DiscrepancyValue
    certificates: dict = field(default_factory=dict)

    @property
    def minimizers(self) -> list[MCRSGroup]:
        return [key_group(k) for k in self.keys]

    def vectors(self) -> list[tuple[tuple, tuple]]:
        """Minimizer lines as plain tuples (integers for real lines,
        (re, im) pairs for Gaussian ones)."""
        out = []
        for key in self.keys:
            pair = []
            for line in key:
                if all(c[1] == 0 for c in line):
                    pair.append(tuple(c[0] for c in line))
                else:
                    pair.append(tuple(line))
            out.append(tuple(pair))
        return out

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "target": self.target.to_json(),
            "rho": self.rho.to_json(),
            "minimizers": [[str(GaussianVector(line)) for line in key] for key in self.keys],
            "certificates": self.certificates,
        }


def _merge_best(parts):
    """Associative (min-rho, merge-ties) reduction."""
    best, keys = None, []
    for rho, ks in parts:
        if rho is None:
            continue
        if best is None:
            best, keys = rho, list(ks)
            continue
        c = _cmp(rho, best, ks[0], keys[0])
        if c < 0:
            best, keys = rho, list(ks)
        elif c == 0:
            keys.extend(ks)
    return best, sorted(set(keys))


def _cmp(r1: DiscrepancyValue, r2: DiscrepancyValue, k1=None, k2=None) -> int:
    try:
        return r1.cmp(r2)
    except PrecisionExhausted:
        raise UndecidedTie(k1, k2) from None


def _reduce_chunk(target_form, keys):
    best, ties = None, []
    for key in keys:
        rho = exact_rho(target_form, key)
        if best is None:
            best, ties = rho, [key]
            continue
        c = _cmp(rho, best, key, ties[0])
        if c < 0:
            best, ties = rho, [key]
        elif c == 0:
            ties.append(key)
    return best, ties


def evaluate_candidates(target_form: MDForm, keys: Iterable[Key], threads: int = 1):
    """Exact minimum over the candidates with all ties; the candidate list is
    split into contiguous chunks and the partial results are merged with
    an order-independent reduction."""
    keys = sorted(set(keys))
    if not keys:
        return None, []
    threads = max(1, threads)
    if threads == 1 or len(keys) < 2 * threads:
        return _merge_best([_reduce_chunk(target_form, keys)])
    size = -(-len(keys) // threads)
    chunks = [keys[i:i + size] for i in range(0, len(keys), size)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda ch: _reduce_chunk(target_form, ch), chunks))
    return _merge_best(parts)


def _fits(A: MCRSGroup, N: int) -> bool:
    return A.is_rational and size_squared(A) <= N * N


def _self_result(q: ApproxQuery, target_form: MDForm) -> ApproxResult:
    key = group_key(q.target)
    rho = exact_rho(target_form, key)
    return ApproxResult(q.target, q.N, [key], rho,
                        {"method": "target-is-rational", "size_squared": key_size_squared(key)})


def _target_max_modulus(form: MDForm):
    best = None
    for c in form.values():
        sq = c.abs2()
        if best is None or compare(sq, best) > 0:
            best = sq
    return best  # squared


def _fmt(x) -> str:
    return format_real(x, 20)


# ---------------------------------------------------------------------------
# exhaustive oracle

def _real_lines(N: int) -> np.ndarray:
    pts = []
    for x in range(0, N + 1):
        for y in range(-N, N + 1):
            if (x == 0 and y <= 0) or math.gcd(x, y) != 1:
                continue
            pts.append((x, y))
    return np.array(pts, dtype=np.int64)


def _float_coeffs(form: MDForm) -> np.ndarray:
    return np.array([complex(c) for c in form.values()], dtype=np.complex128)


def _rho_float(t: np.ndarray, c0, c1, c2) -> np.ndarray:
    diff = np.maximum(np.maximum(np.abs(t[0] - c0), np.abs(t[1] - c1)), np.abs(t[2] - c2))
    plus = np.maximum(np.maximum(np.abs(t[0] + c0), np.abs(t[1] + c1)), np.abs(t[2] + c2))
    return np.minimum(diff, plus)


def _scan_real_pairs(t: np.ndarray, N: int):
    """Float discrepancy and size^2 of every pair of real lines of size <= N."""
    pts = _real_lines(N)
    u, v = pts[:, 0].astype(float), pts[:, 1].astype(float)
    sz = np.maximum(np.abs(pts[:, 0]), np.abs(pts[:, 1])) ** 2
    rows, rhos, sizes = [], [], []
    for i in range(len(pts) - 1):
        j = np.arange(i + 1, len(pts))
        D = u[j] * v[i] - u[i] * v[j]
        c0 = v[i] * v[j] / D
        c1 = -(u[i] * v[j] + u[j] * v[i]) / D
        c2 = u[i] * u[j] / D
        rho = _rho_float(t, c0, c1, c2)
        rows.append(np.stack([np.full(len(j), i), j], axis=1))
        rhos.append(rho)
        sizes.append(np.maximum(sz[i], sz[j]))
    if not rows:
        return pts, np.empty((0, 2), dtype=np.int64), np.empty(0), np.empty(0, dtype=np.int64)
    return pts, np.concatenate(rows), np.concatenate(rhos), np.concatenate(sizes)


def _scan_complex_lines(t: np.ndarray, N: int):
    """Float discrepancy and size^2 of every conjugate pair of size <= N,
    represented by the line (g, w) with g in the canonical quadrant and
    Im(w/g) > 0."""
    N2 = N * N
    r = np.arange(-N, N + 1)
    W1, W2 = np.meshgrid(r, r, indexing="ij")
    W1, W2 = W1.ravel(), W2.ravel()
    wsz = W1 * W1 + W2 * W2
    keep = wsz <= N2
    W1, W2, wsz = W1[keep], W2[keep], wsz[keep]
    rows, rhos, sizes = [], [], []
    for g1 in range(1, N + 1):
        for g2 in range(0, N + 1):
            G = g1 * g1 + g2 * g2
            if G > N2:
                break
            im = (W2 * g1 - W1 * g2)
            sel = im > 0
            if not sel.any():
                continue
            w1, w2 = W1[sel], W2[sel]
            be = im[sel] / G
            al = (w1 * g1 + w2 * g2) / G
            s2 = (al * al + be * be) / (2 * be)
            c0 = -1j * s2
            c1 = 1j * (al / be)
            c2 = -1j / (2 * be)
            rho = _rho_float(t, c0, c1, c2)
            rows.append(np.stack([np.full(len(w1), g1), np.full(len(w1), g2), w1, w2], axis=1))
            rhos.append(rho)
            sizes.append(np.maximum(wsz[sel], G))
    if not rows:
        return np.empty((0, 4), dtype=np.int64), np.empty(0), np.empty(0, dtype=np.int64)
    return np.concatenate(rows), np.concatenate(rhos), np.concatenate(sizes)


_REL = 1e-9
_ABS = 1e-13


def _near(rhos: np.ndarray, best: float, scale: float) -> np.ndarray:
    return rhos <= best * (1 + _REL) + _ABS * (1 + scale)


def brute_force_table(target: MCRSGroup, N_max: int, cap: int = DEFAULT_ORACLE_CAP,
                      threads: int = 1) -> dict[int, ApproxResult]:
    """Exhaustive best approximations for every N in 1..N_max.

    All pairs of distinct lines of size <= N_max are scored in floating
    point once; for each N the candidates within a relative 1e-9 of the
    float minimum are re-evaluated exactly.
    """
    if N_max > cap:
        raise OracleCapExceeded(N_max, cap)
    form = md_form(target)
    t = _float_coeffs(form)
    scale = float(np.max(np.abs(t)))
    pts, rpairs, rrho, rsize = _scan_real_pairs(t, N_max)
    crows, crho, csize = _scan_complex_lines(t, N_max)
    out = {}
    for N in range(1, N_max + 1):
        N2 = N * N
        rm = rsize <= N2
        cm = csize <= N2
        mins = []
        if rm.any():
            mins.append(rrho[rm].min())
        if cm.any():
            mins.append(crho[cm].min())
        best = min(mins)
        keys = set()
        for idx in np.nonzero(rm & _near(rrho, best, scale))[0]:
            i, j = rpairs[idx]
            keys.add(real_pair_key(tuple(pts[i]), tuple(pts[j])))
        for idx in np.nonzero(cm & _near(crho, best, scale))[0]:
            g1, g2, w1, w2 = (int(x) for x in crows[idx])
            keys.add(complex_pair_key((g1, g2), (w1, w2)))
        keys = {k for k in keys if key_size_squared(k) <= N2}
        rho, ties = evaluate_candidates(form, keys, threads)
        out[N] = ApproxResult(target, N, ties, rho, {
            "method": "exhaustive",
            "real_pairs": int(rm.sum()), "complex_pairs": int(cm.sum()),
            "exact_evaluations": len(keys),
            "float_margin": {"relative": _REL, "absolute": _ABS * (1 + scale)},
        })
    return out


def brute_force_best(q: ApproxQuery, cap: int = DEFAULT_ORACLE_CAP, threads: int = 1) -> ApproxResult:
    if q.N > cap:
        raise OracleCapExceeded(q.N, cap)
    form = md_form(q.target)
    if _fits(q.target, q.N):
        return _self_result(q, form)
    return brute_force_table(q.target, q.N, cap, threads)[q.N]


# ---------------------------------------------------------------------------
# hyperbolic targets

def _seed_fractions(alpha, N: int) -> list[Fraction]:
    best, _ = best_dioph_in_box(alpha, N)
    n = best.n
    out = {Fraction(best.m, best.n)}
    for m in (real_floor(alpha * n), real_ceil(alpha * n)):
        if abs(m) <= N:
            out.add(Fraction(m, n))
    for m in (real_floor(alpha), real_ceil(alpha)):
        if abs(m) <= N:
            out.add(Fraction(m))
    return sorted(out)


def _slope_key(f1: Fraction, f2: Fraction) -> Key:
    return real_pair_key((f1.denominator, f1.numerator), (f2.denominator, f2.numerator))


def _bound_chain(a1, a2, N: int) -> dict:
    """The worked bound chain (eps, then delta, then phi caps) for the record."""
    out = {}
    try:
        b1, n1 = best_dioph_in_box(a1, N)
        b2, n2 = best_dioph_in_box(a2, N)
        if n1 is None or n2 is None:
            return {"status": "not applicable: exact rational slope"}
        eps2 = max(Fraction(1, b1.n * n1.n), Fraction(1, b2.n * n2.n))
        out["eps2"] = _fmt(eps2)
        rho_bound = eps_bound_from_delta(a1, a2, eps2)
        out["rho_bound"] = _fmt(rho_bound)
        d1, d2 = delta_bound_from_eps(a1, a2, rho_bound)
        out["delta_bounds"] = [_fmt(d1), _fmt(d2)]
        out["phi_over_q2_caps"] = [_fmt(phi_over_q2_bound(a1, a2, d1, 1).phi_cap()),
                                   _fmt(phi_over_q2_bound(a1, a2, d2, 2).phi_cap())]
        out["status"] = "ok"
    except (ValueError, ArithmeticError) as exc:
        out["status"] = f"not applicable: {exc}"
    return out


def best_approx_hyperbolic(q: ApproxQuery, cap: int = DEFAULT_ORACLE_CAP,
                           threads: int = 1) -> ApproxResult:
    """Certified best approximation of a group with two real eigenlines
    y = a1 x and y = a2 x.

    1. best box approximations of a1 and a2 seed an exactly evaluated
       upper bound R on the optimum;
    2. every candidate with discrepancy <= R has one slope within
       :func:`slope_radius` of a1 and the other within that of a2;
    3. those slopes are enumerated exactly inside the box;
    4. their ``|Phi|/n^2`` values are checked against the matching cap;
    5. all surviving pairs are compared exactly.
    Conjugate-pair candidates are ruled out by the cross-class bound, and
    whenever a bound is not strong enough the search falls back to the
    exhaustive oracle (below the cap) instead of guessing.
    """
    A, N = q.target, q.N
    if A.spectrum_tag != "hyperbolic":
        raise ValueError("target is not hyperbolic")
    a1, a2 = A.slopes()
    if a1 is None or a2 is None:
        raise UseClassicalChart()
    a1, a2 = simplify(a1.re), simplify(a2.re)
    form = md_form(A)
    if _fits(A, N):
        return _self_result(q, form)
    d = _abs(a1 - a2)
    cert: dict = {"method": "lemma", "bound_chain": _bound_chain(a1, a2, N)}

    # step 1: seed
    basic = [(1, 0), (0, 1), (1, 1), (1, -1)]
    v1 = [(f.denominator, f.numerator) for f in _seed_fractions(a1, N)] + basic
    v2 = [(f.denominator, f.numerator) for f in _seed_fractions(a2, N)] + basic
    seeds = sorted({real_pair_key(x, y) for x in v1 for y in v2
                    if x[0] * y[1] != x[1] * y[0]})
    seed_rho, seed_keys = evaluate_candidates(form, seeds)
    cert["seed"] = {"rho": _fmt(seed_rho.value), "candidates": len(seeds)}
    R = seed_rho.value
    M2 = _target_max_modulus(form)
    cross_ok = compare(R * R, M2) < 0
    cert["cross_class"] = {"bound": _fmt(real_sqrt(M2)), "excluded": cross_ok}
    if not cross_ok or compare(R * d, 1) >= 0:
        if N > cap:
            raise OracleCapExceeded(N, cap)
        res = brute_force_table(A, N, cap, threads)[N]
        res.certificates = {**cert, **res.certificates, "method": "exhaustive",
                            "reason": "seed bound too weak for slope confinement"}
        return res

    # steps 2-3: confine and enumerate slopes
    r1 = slope_radius(a1, d, R)
    r2 = slope_radius(a2, d, R)
    S1 = fractions_in_interval(a1 - r1, a1 + r1, N)
    S2 = fractions_in_interval(a2 - r2, a2 + r2, N)
    cert["slope_radius"] = [_fmt(r1), _fmt(r2)]
    cert["slope_counts"] = [len(S1), len(S2)]

    # step 4: |Phi|/n^2 caps
    kept = []
    caps = []
    for alpha, radius, S, side in ((a1, r1, S1, 1), (a2, r2, S2, 2)):
        bound = phi_over_q2_bound(a1, a2, radius, side)
        cap_val = bound.phi_cap()
        caps.append(_fmt(cap_val))
        ok = [f for f in S
              if compare(rdiv(_abs(form.evaluate((CNum(f.denominator), CNum(f.numerator))).modulus()),
                              f.denominator * f.denominator), cap_val) <= 0]
        kept.append(ok)
    cert["phi_over_q2_caps"] = caps
    cert["phi_filter_kept"] = [len(kept[0]), len(kept[1])]

    # step 5
    keys = [_slope_key(f1, f2) for f1 in kept[0] for f2 in kept[1] if f1 != f2]
    cert["pairs_evaluated"] = len(set(keys))
    rho, ties = evaluate_candidates(form, keys + seed_keys, threads)
    return ApproxResult(A, N, ties, rho, cert)


# ---------------------------------------------------------------------------
# conjugate-pair targets

def _complex_moduli(A: MCRSGroup):
    """(alpha, beta, s, r, u) for the pair y = (alpha +- I beta) x, beta > 0.

    The normalised form has coefficients -I s, I r, -I u on x^2, xy, y^2,
    with s = (alpha^2 + beta^2) / (2 beta), r = alpha / beta and
    u = 1 / (2 beta)."""
    slopes = A.slopes()
    if any(z is None for z in slopes):
        raise NotComplexPair()
    z = next((z for z in slopes if sign(z.im) > 0), None)
    if z is None:
        raise NotComplexPair()
    alpha, beta = simplify(z.re), simplify(z.im)
    s = simplify((alpha * alpha + beta * beta) / (2 * beta))
    r = simplify(alpha / beta)
    u = simplify(1 / (2 * beta))
    return alpha, beta, s, r, u


def _complex_seed(alpha, beta, N: int) -> list[Key]:
    dens = {1, N}
    for x in (alpha, beta):
        for c in convergents(_take(cf_terms(x), 40)):
            if c.n <= N:
                dens.add(c.n)
    dens.update(range(1, min(N, 12) + 1))
    keys = {complex_pair_key((1, 0), (0, 1))}
    for n in sorted(dens):
        m1 = real_floor(alpha * n + Fraction(1, 2))
        m2 = real_floor(beta * n + Fraction(1, 2))
        for dm in (0, 1):
            w = (m1, max(m2 + dm, 1))
            if w[0] * w[0] + w[1] * w[1] <= N * N:
                keys.add(complex_pair_key((n, 0), w))
    return sorted(keys)


def _take(it, n):
    out = []
    try:
        for _ in range(n):
            out.append(next(it))
    except (StopIteration, PrecisionExhausted):
        pass
    return out


def _bound_chain_complex(alpha, beta, N: int) -> dict:
    out = {}
    try:
        b1, n1 = best_dioph_in_box(alpha, N)
        b2, n2 = best_dioph_in_box(beta, N)
        if n1 is None or n2 is None:
            return {"status": "not applicable: exact rational part"}
        eps2 = max(Fraction(1, b1.n * n1.n), Fraction(1, b2.n * n2.n))
        out["eps2"] = _fmt(eps2)
        rho_bound = complex_rho_bound(alpha, beta, eps2)
        out["rho_bound"] = _fmt(rho_bound)
        d1, d2 = complex_delta_bounds(alpha, beta, rho_bound)
        out["delta_bounds"] = [_fmt(d1), _fmt(d2)]
        out["phi_factor"] = _fmt(complex_phi_factor(beta, max(d1, d2, key=float)))
        out["status"] = "ok"
    except (ValueError, ArithmeticError) as exc:
        out["status"] = f"not applicable: {exc}"
    return out


def best_approx_complex(q: ApproxQuery, cap: int = DEFAULT_ORACLE_CAP,
                        threads: int = 1) -> ApproxResult:
    """Certified best approximation of a group y = (alpha +- I beta) x.

    With s = |z|^2/(2 beta), r = alpha/beta, u = 1/(2 beta) the target form
    has coefficients (-I s, I r, -I u), and a conjugate-pair candidate with
    moduli (s', r', u') has discrepancy
    ``min(max|s-s'|,|r-r'|,|u-u'|), max(s+s', |r+r'|, u+u'))``.
    For a bound R this confines (alpha', beta') to one rectangle per branch,
    which is scanned exactly shell by shell in the Gaussian denominator.
    """
    A, N = q.target, q.N
    if A.spectrum_tag != "complex-pair":
        raise NotComplexPair()
    alpha, beta, s, r, u = _complex_moduli(A)
    form = md_form(A)
    if _fits(A, N):
        return _self_result(q, form)
    cert: dict = {"method": "rectangle-scan", "bound_chain": _bound_chain_complex(alpha, beta, N),
                  "moduli": {"s": _fmt(s), "r": _fmt(r), "u": _fmt(u)}}
    seeds = _complex_seed(alpha, beta, N)
    seed_rho, seed_keys = evaluate_candidates(form, seeds)
    cert["seed"] = {"rho": _fmt(seed_rho.value), "candidates": len(seeds)}
    sf, rf, uf = float(s), float(r), float(u)
    scale = max(sf, abs(rf), uf)
    absm = _ABS * (1 + scale)
    R0 = float(seed_rho.value) * (1 + _REL) + absm
    rows, vals, Rf = kernels.gauss_scan(N, np.arange(1, N + 1), sf, rf, uf, R0,
                                        rel=_REL, absm=absm, threads=threads)
    near = vals <= Rf * (1 + _REL) + absm if len(vals) else np.zeros(0, dtype=bool)
    keys = set(seed_keys)
    for g1, g2, w1, w2 in rows[near]:
        keys.add(complex_pair_key((int(g1), int(g2)), (int(w1), int(w2))))
    cert["scan"] = {"backend": kernels.BACKEND, "survivors": int(len(vals)),
                    "exact_evaluations": len(keys),
                    "float_margin": {"relative": _REL, "absolute": absm}}
    rho, ties = evaluate_candidates(form, keys, threads)
    M2 = _target_max_modulus(form)
    cross_ok = compare(rho.squared, M2) < 0
    cert["cross_class"] = {"bound": _fmt(real_sqrt(M2)), "excluded": cross_ok}
    if not cross_ok:
        if N > cap:
            raise OracleCapExceeded(N, cap)
        res = brute_force_table(A, N, cap, threads)[N]
        res.certificates = {**cert, **res.certificates, "method": "exhaustive",
                            "reason": "real pairs not excluded by the cross-class bound"}
        return res
    return ApproxResult(A, N, ties, rho, cert)


def best_approx(q: ApproxQuery, cap: int = DEFAULT_ORACLE_CAP, threads: int = 1) -> ApproxResult:
    """Dispatch on the target's spectrum.

    A target with a vertical eigenline lies outside the chart of the pruned
    search; it is answered by exhaustive search while N is within ``cap``.
    """
    tag = q.target.spectrum_tag
    if tag == "hyperbolic":
        try:
            return best_approx_hyperbolic(q, cap, threads)
        except UseClassicalChart:
            if q.N > cap:
                raise
            return brute_force_best(q, cap, threads)
    if tag == "complex-pair":
        return best_approx_complex(q, cap, threads)
    raise ValueError(f"unsupported spectrum {tag!r}")


# ---------------------------------------------------------------------------
# rate sweeps

@dataclass
class LagrangeRateReport:
    records: list  # (N, rho, rho * N^exponent)
    exponent: float
    degenerate: bool

    @property
    def window(self):
        vals = [float(x[2]) for x in self.records if float(x[1]) > 0]
        if not vals:
            return (0.0, 0.0)
        return (min(vals), max(vals))

    def fitted_exponent(self) -> float | None:
        pts = [(math.log(n), math.log(float(rho))) for n, rho, _ in self.records if float(rho) > 0]
        if len(pts) < 2:
            return None
        x, y = np.array(pts).T
        slope = np.polyfit(x, y, 1)[0]
        return float(-slope)

    def to_json(self) -> dict:
        c1, c2 = self.window
        return {"exponent": self.exponent, "degenerate": self.degenerate,
                "window": [c1, c2],
                "records": [{"N": n, "rho": _fmt(rho), "scaled": f"{float(sc):.12e}"}
                            for n, rho, sc in self.records]}


def lagrange_sweep(target: MCRSGroup, N_list: Sequence[int], exponent: float = 2.0,
                   cap: int = DEFAULT_ORACLE_CAP, threads: int = 1) -> LagrangeRateReport:
    records = []
    for N in N_list:
        res = best_approx(ApproxQuery(target, int(N)), cap, threads)
        rho = res.rho.value
        records.append((int(N), rho, float(rho) * float(N) ** exponent))
    degenerate = any(sign(rho) == 0 for _, rho, _ in records)
    return LagrangeRateReport(records, exponent, degenerate)


def fast_cf_terms(M: int, count: int) -> list[int]:
    """Terms a_0 = 1, a_k = n_{k-1}^(M-1) (n_k the convergent denominators,
    n_{-1} taken as 1 so a_1 = 1)."""
    terms = [1]
    n_prev2, n_prev = 0, 1  # n_{-1}, n_0 in the convergent recursion
    for _ in range(count - 1):
        a = max(n_prev, 1) ** (M - 1)
        terms.append(a)
        n_prev2, n_prev = n_prev, a * n_prev + n_prev2
    return terms


def fast_cf_denominators(M: int, count: int) -> list[int]:
    return [c.n for c in convergents(fast_cf_terms(M, count))]


def fast_cf_number(M: int) -> BallReal:
    """The real number [1; a_1, a_2, ...] with the fast-growing terms above,
    as a ball real refined on demand."""
    def enclosure(bits: int):
        count = 4
        while True:
            conv = list(convergents(fast_cf_terms(M, count)))
            p, q = conv[-1], conv[-2]
            lo, hi = sorted((Fraction(p.m, p.n), Fraction(q.m, q.n)))
            if (hi - lo) * 2 ** bits <= 1:
                return lo, hi
            count += 1
    return BallReal.from_function(enclosure)


def fast_cf_group(M: int) -> MCRSGroup:
    """Lines y = alpha x (alpha the fast continued fraction) and y = 0."""
    return MCRSGroup.from_slopes(fast_cf_number(M), 0)


# ---------------------------------------------------------------------------
# sails

def sail_level_of_result(target: MCRSGroup, result: ApproxResult) -> list[dict]:
    """Sail level of every minimizer line, with the a priori cap
    ``|Phi(v)| / alpha`` (alpha the Markoff minimum)."""
    from .sails2d import sail_membership_level
    if target.spectrum_tag != "hyperbolic" or not (target.is_algebraic or target.is_rational):
        raise ValueError("sail levels need an algebraic or rational hyperbolic target")
    form = md_form(target)
    alpha = markoff_minimum(target)
    out = []
    for key in result.keys:
        entry = {"lines": [], "levels": [], "caps": []}
        for line in key:
            if not all(c[1] == 0 for c in line):
                raise ValueError("sail levels are defined for real lines only")
            v = tuple(c[0] for c in line)
            level = sail_membership_level(target, v)
            phi = form.evaluate((CNum(v[0]), CNum(v[1]))).modulus()
            cap_val = simplify(phi / alpha)
            entry["lines"].append(v)
            entry["levels"].append(level)
            entry["caps"].append(cap_val)
        out.append(entry)
    return out

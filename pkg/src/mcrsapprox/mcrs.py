"""MCRS-groups, Markoff-Davenport forms, size and discrepancy."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd, isqrt
from typing import Sequence

import numpy as np

from .numeric import (BallReal, CNum, GaussianVector, QuadraticSurd, compare,
                      format_complex, format_real, gaussian_primitive,
                      poly_eval, rdiv, real_sqrt, sign, simplify)


class NotRegular(ValueError):
    def __init__(self, detail: str = ""):
        super().__init__("not regular" + (f": {detail}" if detail else ""))


class NotRational(ValueError):
    def __init__(self):
        super().__init__("not a rational group")


def _is_exact_zero(x) -> bool:
    x = simplify(x)
    if isinstance(x, (int, Fraction)):
        return x == 0
    if isinstance(x, QuadraticSurd):
        return not x
    return False


# ---------------------------------------------------------------------------
# lines and groups

@dataclass(frozen=True, eq=False)
class EigenLine:
    """A complex line through the origin, direction scaled so its first
    nonzero component equals one."""

    direction: tuple[CNum, ...]
    gaussian: GaussianVector | None = None

    @classmethod
    def from_direction(cls, comps: Sequence, gaussian: GaussianVector | None = None) -> "EigenLine":
        comps = [CNum.coerce(c) for c in comps]
        lead = next((c for c in comps if not c.is_zero()), None)
        if lead is None:
            raise ValueError("zero direction")
        if not (_is_exact_zero(lead.re - 1) and lead.is_real):
            comps = [c / lead for c in comps]
        if gaussian is None and all(_rational_cnum(c) for c in comps):
            gaussian = _gaussian_from_rational(comps)
        return cls(tuple(comps), gaussian)

    @classmethod
    def from_gaussian(cls, v) -> "EigenLine":
        g = gaussian_primitive(v if isinstance(v, GaussianVector) else GaussianVector.of(v))
        return cls.from_direction(g.as_cnums(), g)

    @property
    def is_rational(self) -> bool:
        return self.gaussian is not None

    @property
    def is_real(self) -> bool:
        return all(c.is_real for c in self.direction)

    def conjugate(self) -> "EigenLine":
        g = gaussian_primitive(self.gaussian.conjugate()) if self.gaussian else None
        return EigenLine(tuple(c.conjugate() for c in self.direction), g)

    def slope(self):
        """For plane lines (1, a): the value a; None for the vertical line."""
        if len(self.direction) != 2:
            raise ValueError("slope is defined for plane lines only")
        x, y = self.direction
        if x.is_zero():
            return None
        return y if x == CNum(1) else y / x

    def to_json(self) -> dict:
        d = {"direction": [format_complex(c) for c in self.direction]}
        if self.gaussian is not None:
            d["vector"] = str(self.gaussian)
        return d


def _rational_cnum(c: CNum) -> bool:
    return isinstance(c.re, (int, Fraction)) and isinstance(c.im, (int, Fraction))


def _gaussian_from_rational(comps: Sequence[CNum]) -> GaussianVector:
    den = 1
    for c in comps:
        for part in (c.re, c.im):
            den = den * Fraction(part).denominator // gcd(den, Fraction(part).denominator)
    coords = [(int(Fraction(c.re) * den), int(Fraction(c.im) * den)) for c in comps]
    return gaussian_primitive(GaussianVector(tuple(coords)))




class MCRSGroup:
    """A maximal commutative regular subgroup given by its eigenlines."""

    def __init__(self, lines: Sequence[EigenLine], source=None, charpoly=None,
                 eigenvalues=None, validate: bool = True):
        self.lines = tuple(lines)
        self.n = len(self.lines[0].direction)
        self.source = None if source is None else tuple(tuple(int(v) for v in row) for row in source)
        self.charpoly = None if charpoly is None else tuple(charpoly)
        self.eigenvalues = None if eigenvalues is None else tuple(eigenvalues)
        if validate:
            self._validate()

    def _validate(self):
        if len(self.lines) != self.n or any(len(l.direction) != self.n for l in self.lines):
            raise ValueError("need n lines in n-space")
        det = _det([list(l.direction) for l in self.lines])
        if _is_exact_zero(det.re) and _is_exact_zero(det.im):
            raise ValueError("lines are linearly dependent")
        # complex lines must come in conjugate pairs
        for line in self.lines:
            if not line.is_real:
                conj = line.conjugate()
                if not any(_same_direction(conj, other) for other in self.lines):
                    raise ValueError("complex lines must occur in conjugate pairs")

    # constructors -----------------------------------------------------------
    @classmethod
    def from_vectors(cls, vectors) -> "MCRSGroup":
        """Rational group from integer or Gaussian vectors (tuples ``(a, b)``
        inside a vector denote a + I*b)."""
        return cls([EigenLine.from_gaussian(v) for v in vectors])

    @classmethod
    def from_slopes(cls, a1, a2) -> "MCRSGroup":
        """Plane group with eigenlines y = a1*x and y = a2*x (a None slope
        stands for the vertical line x = 0)."""
        lines = []
        for a in (a1, a2):
            lines.append(EigenLine.from_direction([0, 1] if a is None else [1, a]))
        return cls(lines)

    @classmethod
    def complex_pair(cls, alpha, beta) -> "MCRSGroup":
        """Plane group with eigenlines y = (alpha +- I*beta) x, beta > 0."""
        if sign(beta) == 0:
            raise ValueError("not complex-pair")
        if sign(beta) < 0:
            beta = -beta
        return cls([EigenLine.from_direction([1, CNum(alpha, beta)]),
                    EigenLine.from_direction([1, CNum(alpha, -beta)])])

    @classmethod
    def classical(cls, alpha) -> "MCRSGroup":
        """The group A[alpha] with eigenlines x = 0 and y = alpha*x."""
        return cls.from_slopes(None, alpha)

    # properties -------------------------------------------------------------
    @property
    def spectrum_tag(self) -> str:
        real = [l.is_real for l in self.lines]
        if all(real):
            return "hyperbolic"
        if not any(real):
            return "complex-pair"
        return "mixed"

    @property
    def is_rational(self) -> bool:
        return all(l.is_rational for l in self.lines)

    @property
    def is_algebraic(self) -> bool:
        return self.source is not None

    def slopes(self):
        return tuple(l.slope() for l in self.lines)

    def key(self):
        """Order-independent key for rational groups."""
        return tuple(sorted(l.gaussian.coords for l in self.lines))

    def to_json(self) -> dict:
        d = {"dimension": self.n, "spectrum": self.spectrum_tag,
             "lines": [l.to_json() for l in self.lines]}
        if self.source is not None:
            d["matrix"] = [list(r) for r in self.source]
        if self.charpoly is not None:
            d["charpoly"] = list(self.charpoly)
        return d

    def __repr__(self):
        parts = []
        for l in self.lines:
            parts.append(str(l.gaussian) if l.gaussian else "(" + ", ".join(map(str, l.direction)) + ")")
        return f"MCRSGroup({'; '.join(parts)})"


def _same_direction(a: EigenLine, b: EigenLine) -> bool:
    try:
        return all(x == y for x, y in zip(a.direction, b.direction))
    except ArithmeticError:
        return False


def _det(rows):
    n = len(rows)
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if n == 3:
        a, b, c = rows
        return (a[0] * (b[1] * c[2] - b[2] * c[1])
                - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0]))
    raise ValueError("dimension not supported")


# ---------------------------------------------------------------------------
# construction from integer matrices

def charpoly(M) -> tuple[int, ...]:
    """Characteristic polynomial det(tI - M), highest degree first."""
    n = len(M)
    if n == 2:
        (a, b), (c, d) = M
        return (1, -(a + d), a * d - b * c)
    if n == 3:
        tr = sum(M[i][i] for i in range(3))
        minors = (M[0][0] * M[1][1] - M[0][1] * M[1][0]
                  + M[0][0] * M[2][2] - M[0][2] * M[2][0]
                  + M[1][1] * M[2][2] - M[1][2] * M[2][1])
        det = _det([list(r) for r in M])
        return (1, -tr, minors, -det)
    raise ValueError("only 2x2 and 3x3 matrices are supported")


def _rational_roots(coeffs) -> list[Fraction]:
    """Rational roots of a monic integer polynomial (they are integers)."""
    c0 = coeffs[-1]
    if c0 == 0:
        return [Fraction(0)] + _rational_roots(coeffs[:-1]) if len(coeffs) > 1 else []
    out = []
    n = abs(c0)
    for k in range(1, isqrt(n) + 1):
        if n % k == 0:
            for dvs in {k, n // k}:
                for r in (dvs, -dvs):
                    if poly_eval(coeffs, Fraction(r)) == 0 and Fraction(r) not in out:
                        out.append(Fraction(r))
    return out


def _quadratic_roots(b, c):
    """Roots of t^2 + b t + c with rational b, c: real surds or a complex pair."""
    disc = Fraction(b) * b - 4 * Fraction(c)
    if disc == 0:
        raise NotRegular("repeated eigenvalue")
    half = Fraction(-b, 2) if isinstance(b, int) else -Fraction(b) / 2
    if disc > 0:
        root = real_sqrt(disc)
        return [half + root / 2, half - root / 2]
    root = real_sqrt(-disc)
    return [CNum(half, root / 2), CNum(half, -root / 2)]


def _isolate_real_roots(coeffs) -> list[BallReal]:
    """Real roots of a square-free integer cubic without rational roots."""
    roots = np.roots([float(c) for c in coeffs])
    real = sorted(r.real for r in roots if abs(r.imag) < 1e-9 * (1 + abs(r)))
    a, b, c, d = coeffs
    disc = 18 * a * b * c * d - 4 * b ** 3 * d + b * b * c * c - 4 * a * c ** 3 - 27 * a * a * d * d
    expected = 3 if disc > 0 else 1
    if len(real) != expected:
        real = sorted(r.real for r in roots)[:expected] if expected == 3 else \
            [min((r for r in roots), key=lambda r: abs(r.imag)).real]
    for h in (1e-6, 1e-9, 1e-3, 1e-12):
        ok = True
        bounds = []
        for r in real:
            lo = Fraction(r - h * (1 + abs(r)))
            hi = Fraction(r + h * (1 + abs(r)))
            flo, fhi = poly_eval(coeffs, lo), poly_eval(coeffs, hi)
            if flo == 0 or fhi == 0 or (flo > 0) == (fhi > 0):
                ok = False
                break
            bounds.append((lo, hi))
        if ok and all(bounds[i][1] < bounds[i + 1][0] for i in range(len(bounds) - 1)):
            return [BallReal.root(coeffs, lo, hi) for lo, hi in bounds]
    raise ArithmeticError("failed to isolate real roots")


def _eigenvector3(M, lam) -> list[CNum]:
    lam = CNum.coerce(lam)
    rows = [[CNum(M[i][j]) - (lam if i == j else CNum(0)) for j in range(3)] for i in range(3)]
    best, best_mag = None, -1.0
    for i, j in ((0, 1), (0, 2), (1, 2)):
        r, s = rows[i], rows[j]
        v = [r[1] * s[2] - r[2] * s[1], r[2] * s[0] - r[0] * s[2], r[0] * s[1] - r[1] * s[0]]
        mag = max(abs(complex(x)) for x in v)
        if mag > best_mag + 1e-12:
            best, best_mag = v, mag
    if best_mag < 1e-12:
        raise NotRegular("eigenvector extraction failed")
    return best


def group_from_matrix(M) -> MCRSGroup:
    """The MCRS-group of the eigenlines of a regular 2x2 or 3x3 integer matrix."""
    M = [[int(v) for v in row] for row in M]
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("matrix must be square")
    cp = charpoly(M)
    if n == 2:
        (a, b), (c, d) = M
        eig = _quadratic_roots(cp[1], cp[2])
        lines = []
        for lam in eig:
            lam = CNum.coerce(lam)
            if b != 0:
                vec = [CNum(b), lam - a]
            elif c != 0:
                vec = [lam - d, CNum(c)]
            else:
                vec = [CNum(1), CNum(0)] if lam == CNum(a) else [CNum(0), CNum(1)]
            lines.append(EigenLine.from_direction(vec))
        return MCRSGroup(lines, source=M, charpoly=cp, eigenvalues=eig)
    # n == 3
    rat = _rational_roots(cp)
    if rat:
        r = rat[0]
        # deflate: t^3 + p t^2 + q t + s = (t - r)(t^2 + b t + c)
        b = cp[1] + r
        c = cp[2] + r * b
        rest = _quadratic_roots(b, c)
        for x in rest:
            if not isinstance(x, CNum) and x == r:
                raise NotRegular("repeated eigenvalue")
        eig = [r] + rest
    else:
        a_, b_, c_, d_ = cp
        disc = 18 * a_ * b_ * c_ * d_ - 4 * b_ ** 3 * d_ + b_ * b_ * c_ * c_ - 4 * a_ * c_ ** 3 - 27 * a_ * a_ * d_ * d_
        if disc == 0:
            raise NotRegular("repeated eigenvalue")
        real = _isolate_real_roots(cp)
        if disc > 0:
            eig = real
        else:
            xi = real[0]
            s = xi + cp[1]
            re = -s / 2
            disc2 = 4 * (cp[2] + xi * s) - s * s
            im = BallReal.sqrt_of(disc2) / 2
            eig = [xi, CNum(re, im), CNum(re, -im)]
    real_eigs = [e for e in eig if not isinstance(e, CNum)]
    cplx = [e for e in eig if isinstance(e, CNum)]
    real_eigs.sort(key=lambda e: float(e), reverse=True)
    cplx.sort(key=lambda z: -float(z.im))
    eig = real_eigs + cplx
    lines = [EigenLine.from_direction(_eigenvector3(M, lam)) for lam in eig]
    return MCRSGroup(lines, source=M, charpoly=cp, eigenvalues=eig, validate=False)


# ---------------------------------------------------------------------------
# Markoff-Davenport forms

def monomials(n: int):
    """Degree-n monomials in n variables, lexicographic (x1^n first)."""
    out = [e for e in product(range(n + 1), repeat=n) if sum(e) == n]
    out.sort(reverse=True)
    return out


@dataclass(frozen=True, eq=False)
class MDForm:
    degree: int
    coeffs: tuple[tuple[tuple[int, ...], CNum], ...]

    def coefficient(self, exps) -> CNum:
        for e, c in self.coeffs:
            if e == tuple(exps):
                return c
        raise KeyError(exps)

    def values(self) -> list[CNum]:
        return [c for _, c in self.coeffs]

    def evaluate(self, v):
        total = CNum(0)
        for e, c in self.coeffs:
            term = c
            for x, k in zip(v, e):
                for _ in range(k):
                    term = term * x
            total = total + term
        return total

    def __neg__(self):
        return MDForm(self.degree, tuple((e, -c) for e, c in self.coeffs))

    def canonical(self) -> "MDForm":
        """Sign choice: the first nonzero coefficient has positive real part
        (positive imaginary part when it is purely imaginary)."""
        for _, c in self.coeffs:
            if c.is_zero():
                continue
            s = sign(c.re) if not _is_exact_zero(c.re) else sign(c.im)
            return self if s > 0 else -self
        return self

    def to_json(self) -> dict:
        names = "xyzw"
        out = {}
        for e, c in self.coeffs:
            mono = "*".join(f"{names[i]}^{k}" if k > 1 else names[i] for i, k in enumerate(e) if k)
            out[mono] = format_complex(c)
        return {"degree": self.degree, "coefficients": out}


def _poly_mul(p: dict, linear: Sequence[CNum]) -> dict:
    out: dict = {}
    for e, c in p.items():
        for i, a in enumerate(linear):
            if a.is_zero():
                continue
            e2 = tuple(k + (1 if j == i else 0) for j, k in enumerate(e))
            prev = out.get(e2)
            out[e2] = c * a if prev is None else prev + c * a
    return out


def md_form_from_directions(dirs: Sequence[Sequence]) -> MDForm:
    """Form det(V) * prod_k (V^{-1} x)_k for the matrix V with the given
    columns, expanded as prod_k (adj(V)_k . x) / det(V)^(n-1)."""
    n = len(dirs)
    V = [[CNum.coerce(dirs[j][i]) for j in range(n)] for i in range(n)]  # columns are lines
    det = _det(V)
    if det.is_zero():
        raise ValueError("degenerate lines")
    if n == 2:
        adj = [[V[1][1], -V[0][1]], [-V[1][0], V[0][0]]]
    elif n == 3:
        adj = [[None] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                rows = [r for k, r in enumerate(V) if k != j]
                minor = [[x for l, x in enumerate(r) if l != i] for r in rows]
                cof = _det(minor)
                adj[i][j] = cof if (i + j) % 2 == 0 else -cof
    else:
        raise ValueError("dimension not supported")
    poly = {tuple([0] * n): CNum(1)}
    for row in adj:
        poly = _poly_mul(poly, row)
    scale = det
    for _ in range(n - 2):
        scale = scale * det
    coeffs = []
    for e in monomials(n):
        c = poly.get(e, CNum(0))
        coeffs.append((e, c / scale if not c.is_zero() else CNum(0)))
    return MDForm(n, tuple(coeffs))


def md_form(A: MCRSGroup) -> MDForm:
    """Markoff-Davenport form of the group (up to a global sign)."""
    return md_form_from_directions([l.direction for l in A.lines])


def md_form_simul3(a, b, c) -> MDForm:
    """Form of the group spanned by (a,b,c), (0,1,I), (0,1,-I):

    I*(-(b^2+c^2)/(2a^2) x^3 + (b/a) x^2 y + (c/a) x^2 z - x y^2/2 - x z^2/2).
    """
    if _is_exact_zero(a):
        raise ValueError("vertical direction unsupported in A[a,b,c] chart")
    beta = rdiv(b, a)
    gamma = rdiv(c, a)
    cube = -(beta * beta + gamma * gamma) / 2
    table = {(3, 0, 0): cube, (2, 1, 0): beta, (2, 0, 1): gamma,
             (1, 2, 0): Fraction(-1, 2), (1, 0, 2): Fraction(-1, 2)}
    coeffs = tuple((e, CNum(0, table[e]) if e in table else CNum(0)) for e in monomials(3))
    return MDForm(3, coeffs)


def simul3_group(a, b, c) -> MCRSGroup:
    return MCRSGroup([EigenLine.from_direction([a, b, c]),
                      EigenLine.from_direction([0, 1, CNum(0, 1)]),
                      EigenLine.from_direction([0, 1, CNum(0, -1)])])


# ---------------------------------------------------------------------------
# size and discrepancy

def size_squared(A: MCRSGroup) -> int:
    if not A.is_rational:
        raise NotRational()
    return max(l.gaussian.norm2() for l in A.lines)


def size(A: MCRSGroup):
    """Max over lines of the max-coordinate modulus of a primitive Gaussian
    vector; an integer for real groups, possibly a surd for complex ones."""
    value = simplify(real_sqrt(size_squared(A)))
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


@dataclass(frozen=True, eq=False)
class DiscrepancyValue:
    """``squared`` is exact whenever the inputs allow; ``value`` is its
    non-negative square root in the lowest exact tier available."""

    squared: object
    value: object
    branch: str  # "sum" | "difference"

    def __lt__(self, other):
        return compare(self.squared, other.squared) < 0

    def cmp(self, other) -> int:
        return compare(self.squared, other.squared)

    def __float__(self):
        return float(self.value)

    def to_json(self) -> dict:
        return {"value": format_real(self.value), "branch": self.branch,
                "float": f"{float(self.value):.12e}"}


def _max_modulus(coeffs: Sequence[CNum]):
    best_sq, best_c = None, None
    for c in coeffs:
        sq = c.abs2()
        if best_sq is None or compare(sq, best_sq) > 0:
            best_sq, best_c = sq, c
    return best_sq, best_c


def form_discrepancy(f1: MDForm, f2: MDForm) -> DiscrepancyValue:
    diff = [c1 - c2 for (_, c1), (_, c2) in zip(f1.coeffs, f2.coeffs)]
    plus = [c1 + c2 for (_, c1), (_, c2) in zip(f1.coeffs, f2.coeffs)]
    dsq, dc = _max_modulus(diff)
    psq, pc = _max_modulus(plus)
    if compare(dsq, psq) <= 0:
        return DiscrepancyValue(dsq, dc.modulus(), "difference")
    return DiscrepancyValue(psq, pc.modulus(), "sum")


def discrepancy(A1: MCRSGroup, A2: MCRSGroup) -> DiscrepancyValue:
    """min over the signs of the largest coefficient modulus of Phi1 -+ Phi2."""
    if A1.n != A2.n:
        raise ValueError("groups of different dimension")
    return form_discrepancy(md_form(A1), md_form(A2))


# ---------------------------------------------------------------------------
# Markoff minimum

def markoff_minimum(A: MCRSGroup):
    """min |Phi_A| over nonzero integer points of a plane group.

    Irrational algebraic groups: the minimum over one period of the vertices
    of the geometric continued fraction.  Rational groups: the minimum over
    integer points off the eigenlines, found by a finite residue scan.
    """
    if A.n != 2 or A.spectrum_tag != "hyperbolic":
        raise ValueError("Markoff minimum needs a hyperbolic plane group")
    if A.is_rational:
        return _rational_markoff_minimum(A)
    if A.source is None:
        raise ValueError("Markoff minimum needs an algebraic group (integer source matrix)")
    from .sails2d import markoff_minimum_from_sails
    return markoff_minimum_from_sails(A)


def _rational_markoff_minimum(A: MCRSGroup):
    # Phi = L1 L2 / det, L_i integer primitive forms vanishing on the lines
    (u1, v1), (u2, v2) = (l.gaussian.coords for l in A.lines)
    u1, v1, u2, v2 = u1[0], v1[0], u2[0], v2[0]
    L1 = (v2, -u2)  # vanishes on line 2
    L2 = (v1, -u1)  # vanishes on line 1
    det = L1[0] * L2[1] - L1[1] * L2[0]
    D = abs(det)
    best = None
    for s in range(-D, D + 1):
        for t in range(-D, D + 1):
            if s == 0 or t == 0:
                continue
            # (x, y) = M^{-1}(s, t) must be integral
            x_num = s * L2[1] - L1[1] * t
            y_num = L1[0] * t - L2[0] * s
            if x_num % det or y_num % det:
                continue
            val = abs(s * t)
            if best is None or val < best:
                best = val
    return Fraction(best, D)

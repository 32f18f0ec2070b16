"""Exact and certified real/complex arithmetic.

Three real tiers are used throughout the package:

* ``int`` / :class:`fractions.Fraction` for rationals,
* :class:`QuadraticSurd` for elements ``(p + q*sqrt(d))/r`` of a real
  quadratic field,
* :class:`BallReal` for everything else (cubic eigenvalues, square roots
  of surds, limits of sequences).  A ball is a lazy expression that can be
  enclosed in a dyadic interval of any requested width.

Mixed arithmetic promotes upwards: rational -> surd -> ball.  Comparisons
are exact for the first two tiers; ball comparisons refine until the sign
is certified and raise :class:`PrecisionExhausted` otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Callable, Iterable, Sequence


class IncomparableSurdFields(ValueError):
    def __init__(self, d1=None, d2=None):
        msg = "incomparable surd fields"
        if d1 is not None:
            msg += f" (sqrt {d1} vs sqrt {d2})"
        super().__init__(msg)


class PrecisionExhausted(ArithmeticError):
    """A ball comparison could not be decided within the precision budget."""


class PrecisionContext:
    """Working precision for ball enclosures and the refinement ceiling."""

    def __init__(self, bits: int = 128, max_bits: int = 4096):
        self.bits = bits
        self.max_bits = max_bits


context = PrecisionContext()


def set_precision(bits: int, max_bits: int | None = None) -> None:
    if bits < 1:
        raise ValueError("precision must be positive")
    context.bits = bits
    context.max_bits = max(max_bits if max_bits is not None else 32 * bits, bits)


# ---------------------------------------------------------------------------
# small integer helpers

def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(s, m)`` with ``n == s*s*m`` and ``m`` square-free."""
    if n <= 0:
        raise ValueError("squarefree_split needs a positive integer")
    s, m = 1, n
    f = 2
    while f * f <= m:
        while m % (f * f) == 0:
            m //= f * f
            s *= f
        f += 1 if f == 2 else 2
    return s, m


def floor_sqrt_times(q: int, d: int) -> int:
    """floor(q*sqrt(d)) for integer q and non-square d > 0."""
    if q >= 0:
        return isqrt(q * q * d)
    return -(isqrt(q * q * d) + 1)


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def is_rational(x) -> bool:
    return isinstance(x, (int, Fraction))


# ---------------------------------------------------------------------------
# quadratic surds

class QuadraticSurd:
    """The real number ``(p + q*sqrt(d)) / r``.

    ``d`` is square-free and greater than one unless ``q == 0``; rational
    values are accepted and compare with surds of every field.
    """

    __slots__ = ("p", "q", "r", "d")

    def __init__(self, p: int, q: int = 0, r: int = 1, d: int = 1):
        if r == 0:
            raise ZeroDivisionError("surd with zero denominator")
        if q != 0:
            if d <= 0:
                raise ValueError("surd radicand must be positive")
            s, d = squarefree_split(d)
            q *= s
            if d == 1:
                p, q = p + q, 0
        if q == 0:
            d = 1
        if r < 0:
            p, q, r = -p, -q, -r
        g = gcd(gcd(p, q), r)
        if g > 1:
            p, q, r = p // g, q // g, r // g
        self.p, self.q, self.r, self.d = p, q, r, d

    # construction ---------------------------------------------------------
    @classmethod
    def from_rational(cls, x, d: int = 1) -> "QuadraticSurd":
        x = _as_fraction(x)
        s = cls(x.numerator, 0, x.denominator)
        return s

    @classmethod
    def sqrt(cls, n) -> "QuadraticSurd":
        """Exact square root of a non-negative rational."""
        n = _as_fraction(n)
        if n < 0:
            raise ValueError("square root of a negative rational")
        # sqrt(a/b) = sqrt(a*b)/b
        return cls(0, 1, n.denominator, n.numerator * n.denominator) if n else cls(0)

    @classmethod
    def coerce(cls, x) -> "QuadraticSurd":
        if isinstance(x, QuadraticSurd):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.from_rational(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to QuadraticSurd")

    # predicates -----------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def to_fraction(self) -> Fraction:
        if self.q:
            raise ValueError("irrational surd")
        return Fraction(self.p, self.r)

    def simplify(self):
        """Rational values come back as Fraction, others unchanged."""
        return Fraction(self.p, self.r) if self.q == 0 else self

    def _field(self, other: "QuadraticSurd") -> int:
        if self.q == 0:
            return other.d
        if other.q == 0 or other.d == self.d:
            return self.d
        raise IncomparableSurdFields(self.d, other.d)

    def sign(self) -> int:
        p, q, d = self.p, self.q, self.d
        if q == 0:
            return (p > 0) - (p < 0)
        if p == 0:
            return 1 if q > 0 else -1
        if (p > 0) == (q > 0):
            return 1 if p > 0 else -1
        diff = p * p - q * q * d
        # diff != 0 because d is not a square
        return (1 if p > 0 else -1) if diff > 0 else (1 if q > 0 else -1)

    def floor(self) -> int:
        if self.q == 0:
            return self.p // self.r
        return (self.p + floor_sqrt_times(self.q, self.d)) // self.r

    def ceil(self) -> int:
        return -(-self).floor()

    def conjugate(self) -> "QuadraticSurd":
        return QuadraticSurd(self.p, -self.q, self.r, self.d)

    def norm(self) -> Fraction:
        return Fraction(self.p * self.p - self.q * self.q * self.d, self.r * self.r)

    # arithmetic -----------------------------------------------------------
    def _promote(self, other):
        if isinstance(other, QuadraticSurd):
            return other
        if isinstance(other, (int, Fraction)):
            return QuadraticSurd.from_rational(other)
        return None

    def __neg__(self):
        return QuadraticSurd(-self.p, -self.q, self.r, self.d)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __add__(self, other):
        o = self._promote(other)
        if o is None:
            return NotImplemented
        try:
            d = self._field(o)
        except IncomparableSurdFields:
            return BallReal.coerce(self) + BallReal.coerce(o)
        return QuadraticSurd(self.p * o.r + o.p * self.r,
                             self.q * o.r + o.q * self.r, self.r * o.r, d)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._promote(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._promote(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._promote(other)
        if o is None:
            return NotImplemented
        try:
            d = self._field(o)
        except IncomparableSurdFields:
            return BallReal.coerce(self) * BallReal.coerce(o)
        return QuadraticSurd(self.p * o.p + self.q * o.q * d,
                             self.p * o.q + self.q * o.p, self.r * o.r, d)

    __rmul__ = __mul__

    def inverse(self) -> "QuadraticSurd":
        n = self.p * self.p - self.q * self.q * self.d
        if n == 0:
            raise ZeroDivisionError("inverse of zero surd")
        # r/(p + q s) = r (p - q s) / n
        return QuadraticSurd(self.r * self.p, -self.r * self.q, n, self.d)

    def __truediv__(self, other):
        o = self._promote(other)
        if o is None:
            return NotImplemented
        try:
            self._field(o)
        except IncomparableSurdFields:
            return BallReal.coerce(self) / BallReal.coerce(o)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._promote(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = QuadraticSurd(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # comparison -----------------------------------------------------------
    def _cmp(self, other) -> int:
        o = self._promote(other)
        if o is None:
            raise TypeError
        self._field(o)
        return (self - o).sign()

    def __eq__(self, other):
        if isinstance(other, BallReal):
            return NotImplemented
        o = self._promote(other)
        if o is None:
            return NotImplemented
        if self.q == 0 and o.q == 0:
            return self.p * o.r == o.p * self.r
        return (self.p, self.q, self.r, self.d) == (o.p, o.q, o.r, o.d)

    def __hash__(self):
        if self.q == 0:
            return hash(Fraction(self.p, self.r))
        return hash((self.p, self.q, self.r, self.d))

    def __lt__(self, other):
        if isinstance(other, BallReal):
            return NotImplemented
        if self._promote(other) is None:
            return NotImplemented
        return self._cmp(other) < 0

    def __le__(self, other):
        if isinstance(other, BallReal):
            return NotImplemented
        if self._promote(other) is None:
            return NotImplemented
        return self._cmp(other) <= 0

    def __gt__(self, other):
        if isinstance(other, BallReal):
            return NotImplemented
        if self._promote(other) is None:
            return NotImplemented
        return self._cmp(other) > 0

    def __ge__(self, other):
        if isinstance(other, BallReal):
            return NotImplemented
        if self._promote(other) is None:
            return NotImplemented
        return self._cmp(other) >= 0

    def __bool__(self):
        return self.p != 0 or self.q != 0

    def __float__(self):
        return float(self.enclosure(64)[0])

    def enclosure(self, bits: int) -> tuple[Fraction, Fraction]:
        """Dyadic interval of width at most 2**-bits containing the value."""
        if self.q == 0:
            v = Fraction(self.p, self.r)
            return v, v
        shift = bits + self.r.bit_length() + 2
        scale = 1 << shift
        lo_root = floor_sqrt_times(self.q * scale, self.d)
        lo = Fraction(self.p * scale + lo_root, self.r * scale)
        hi = Fraction(self.p * scale + lo_root + 1, self.r * scale)
        return lo, hi

    def __repr__(self):
        return f"QuadraticSurd({self.p}, {self.q}, {self.r}, {self.d})"

    def __str__(self):
        if self.q == 0:
            return str(Fraction(self.p, self.r))
        sgn = "+" if self.q >= 0 else "-"
        return f"({self.p}{sgn}{abs(self.q)} sqrt {self.d})/{self.r}"


def surd_cmp(x: QuadraticSurd, y) -> int:
    """Exact three-way comparison of a surd with a surd or rational."""
    x = QuadraticSurd.coerce(x)
    y = QuadraticSurd.coerce(y)
    return x._cmp(y)


# ---------------------------------------------------------------------------
# ball reals

def _floor_dyadic(x: Fraction, bits: int) -> Fraction:
    return Fraction(math.floor(x * (1 << bits)), 1 << bits)


def _ceil_dyadic(x: Fraction, bits: int) -> Fraction:
    return Fraction(math.ceil(x * (1 << bits)), 1 << bits)


def _pow2(e: int) -> Fraction:
    return Fraction(1 << e) if e >= 0 else Fraction(1, 1 << -e)


def _width_bits(width: Fraction) -> int:
    """Largest e with width <= 2**-e."""
    if width <= 0:
        return 1 << 30
    e = width.denominator.bit_length() - width.numerator.bit_length()
    while width > _pow2(-e):
        e -= 1
    while width <= _pow2(-(e + 1)):
        e += 1
    return e


def _magnitude_bits(lo: Fraction, hi: Fraction) -> int:
    m = max(abs(lo), abs(hi))
    return max(0, math.ceil(m).bit_length())


class _Node:
    """Base class of lazy ball expressions; subclasses implement _compute."""

    exact: Fraction | None = None

    def __init__(self):
        self._memo: dict[int, tuple[Fraction, Fraction]] = {}

    def interval(self, bits: int) -> tuple[Fraction, Fraction]:
        hit = self._memo.get(bits)
        if hit is not None:
            return hit
        target = _pow2(-bits)
        extra = 4
        while True:
            lo, hi = self._compute(bits, extra)
            if hi - lo <= target:
                break
            deficit = bits - _width_bits(hi - lo)
            extra += max(deficit, 1) + 4
            if extra > context.max_bits + 64:
                raise PrecisionExhausted(
                    f"enclosure of width 2^-{bits} needs more than {context.max_bits} bits")
        out = (_floor_dyadic(lo, bits + 3), _ceil_dyadic(hi, bits + 3))
        self._memo[bits] = out
        return out

    def _compute(self, bits: int, extra: int) -> tuple[Fraction, Fraction]:
        raise NotImplementedError


class _Const(_Node):
    def __init__(self, value: Fraction):
        super().__init__()
        self.exact = value

    def interval(self, bits):
        return self.exact, self.exact


class _SurdLeaf(_Node):
    def __init__(self, surd: QuadraticSurd):
        super().__init__()
        self.surd = surd

    def _compute(self, bits, extra):
        return self.surd.enclosure(bits + extra)


class _FuncLeaf(_Node):
    def __init__(self, fn: Callable[[int], tuple[Fraction, Fraction]]):
        super().__init__()
        self.fn = fn

    def _compute(self, bits, extra):
        lo, hi = self.fn(bits + extra)
        return _as_fraction(lo), _as_fraction(hi)


def poly_eval(coeffs: Sequence[int], x: Fraction) -> Fraction:
    """Horner evaluation; ``coeffs`` from highest degree down."""
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


class _RootLeaf(_Node):
    """A simple irrational root of an integer polynomial inside [a, b]."""

    def __init__(self, coeffs: Sequence[int], a: Fraction, b: Fraction):
        super().__init__()
        self.coeffs = tuple(coeffs)
        self.a, self.b = Fraction(a), Fraction(b)
        sa = poly_eval(self.coeffs, self.a)
        sb = poly_eval(self.coeffs, self.b)
        if sa == 0 or sb == 0 or (sa > 0) == (sb > 0):
            raise ValueError("interval does not isolate a sign change")
        self._sign_a = 1 if sa > 0 else -1
        self._depth = 0
        self._index = 0  # current interval is a + [index, index+1]*(b-a)/2**depth

    def _bisect_to(self, depth: int) -> None:
        w = self.b - self.a
        while self._depth < depth:
            j = 2 * self._index + 1
            mid = self.a + w * Fraction(j, 1 << (self._depth + 1))
            v = poly_eval(self.coeffs, mid)
            if v == 0:
                raise ValueError("rational root reached during bisection")
            self._depth += 1
            self._index = j if (v > 0) == (self._sign_a > 0) else j - 1

    def _compute(self, bits, extra):
        w = self.b - self.a
        depth = max(0, bits + extra + w.numerator.bit_length() - w.denominator.bit_length() + 1)
        self._bisect_to(depth)
        idx = self._index >> (self._depth - depth)
        lo = self.a + w * Fraction(idx, 1 << depth)
        hi = self.a + w * Fraction(idx + 1, 1 << depth)
        return lo, hi


def _split_scale(node):
    """Write node as c * core with c rational, peeling negations and
    constant factors, so that proportional expressions can be spotted."""
    c = Fraction(1)
    while True:
        if isinstance(node, _Neg):
            c, node = -c, node.a
        elif isinstance(node, _Mul) and isinstance(node.a, _Const):
            c, node = c * node.a.exact, node.b
        elif isinstance(node, _Mul) and isinstance(node.b, _Const):
            c, node = c * node.b.exact, node.a
        else:
            return c, node


class _Neg(_Node):
    def __init__(self, a: _Node):
        super().__init__()
        self.a = a

    def _compute(self, bits, extra):
        lo, hi = self.a.interval(bits + extra)
        return -hi, -lo


class _Abs(_Node):
    def __init__(self, a: _Node):
        super().__init__()
        self.a = a

    def _compute(self, bits, extra):
        lo, hi = self.a.interval(bits + extra)
        if lo >= 0:
            return lo, hi
        if hi <= 0:
            return -hi, -lo
        return Fraction(0), max(-lo, hi)


class _Add(_Node):
    def __init__(self, a: _Node, b: _Node):
        super().__init__()
        self.a, self.b = a, b

    def _compute(self, bits, extra):
        alo, ahi = self.a.interval(bits + extra)
        blo, bhi = self.b.interval(bits + extra)
        return alo + blo, ahi + bhi


class _Mul(_Node):
    def __init__(self, a: _Node, b: _Node):
        super().__init__()
        self.a, self.b = a, b

    def _compute(self, bits, extra):
        alo, ahi = self.a.interval(2)
        blo, bhi = self.b.interval(2)
        grow = _magnitude_bits(alo, ahi) + _magnitude_bits(blo, bhi) + 1
        p = bits + extra + grow
        alo, ahi = self.a.interval(p)
        blo, bhi = self.b.interval(p)
        prods = (alo * blo, alo * bhi, ahi * blo, ahi * bhi)
        return min(prods), max(prods)


class _Inv(_Node):
    def __init__(self, a: _Node):
        super().__init__()
        self.a = a

    def _compute(self, bits, extra):
        p = max(bits, 8) + extra
        while True:
            lo, hi = self.a.interval(p)
            if lo > 0 or hi < 0:
                break
            if p > context.max_bits:
                raise PrecisionExhausted("division by a ball containing zero")
            p = 2 * p
        m = min(abs(lo), abs(hi))
        need = bits + extra + 2 * max(0, math.ceil(1 / m).bit_length())
        if need > p:
            lo, hi = self.a.interval(need)
        return 1 / hi, 1 / lo


class _Sqrt(_Node):
    def __init__(self, a: _Node):
        super().__init__()
        self.a = a

    def _compute(self, bits, extra):
        p = 2 * (bits + extra)
        lo, hi = self.a.interval(p)
        if hi < 0:
            raise ValueError("square root of a negative ball")
        lo = max(lo, Fraction(0))
        k = bits + extra + 2
        scale = 1 << (2 * k)
        slo = Fraction(isqrt(math.floor(lo * scale)), 1 << k)
        shi = Fraction(isqrt(math.ceil(hi * scale)) + 1, 1 << k)
        return slo, shi


# ---------------------------------------------------------------------------
# algebraic zero test
#
# Interval refinement can separate distinct values but never proves that
# two expressions are equal.  As a fallback an expression is expanded into
# a polynomial over its irrational leaves (roots of integer polynomials,
# square roots, opaque leaves), with powers of polynomial roots reduced by
# their defining polynomial.  A zero expansion proves the value is zero;
# a nonzero one proves nothing.

_FORM_TERM_LIMIT = 4000


class _FormTooLarge(Exception):
    pass


def _form_key(form: dict) -> tuple:
    return tuple(sorted(form.items(), key=repr))


def _form_add(a: dict, b: dict, scale: Fraction = Fraction(1)) -> dict:
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, 0) + scale * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    powers = dict(m1)
    for atom, k in m2:
        powers[atom] = powers.get(atom, 0) + k
    return tuple(sorted(powers.items(), key=repr))


class _FormBuilder:
    def __init__(self):
        self.memo: dict[int, dict] = {}
        self.relations: dict = {}  # atom -> (degree, {power: coefficient}) for atom^degree

    def const(self, c) -> dict:
        return {(): Fraction(c)} if c else {}

    def atom(self, key, relation=None) -> dict:
        if relation is not None:
            self.relations[key] = relation
        return {((key, 1),): Fraction(1)}

    def mul(self, a: dict, b: dict) -> dict:
        out: dict = {}
        for m1, c1 in a.items():
            for m2, c2 in b.items():
                out = _form_add(out, self.reduce_mono(_mono_mul(m1, m2)), c1 * c2)
        if len(out) > _FORM_TERM_LIMIT:
            raise _FormTooLarge()
        return out

    def reduce_mono(self, mono: tuple) -> dict:
        for i, (atom, k) in enumerate(mono):
            rel = self.relations.get(atom)
            if rel is not None and k >= rel[0]:
                deg, lower = rel
                rest = mono[:i] + ((atom, k - deg),) + mono[i + 1:]
                rest = tuple(x for x in rest if x[1])
                out: dict = {}
                for p, c in lower.items():
                    piece = _mono_mul(rest, ((atom, p),)) if p else rest
                    out = _form_add(out, self.reduce_mono(piece), c)
                return out
        return {mono: Fraction(1)}

    def build(self, node) -> dict:
        hit = self.memo.get(id(node))
        if hit is not None:
            return hit
        out = self._build(node)
        self.memo[id(node)] = out
        return out

    def _build(self, node) -> dict:
        if node.exact is not None:
            return self.const(node.exact)
        if isinstance(node, _Neg):
            return {m: -c for m, c in self.build(node.a).items()}
        if isinstance(node, _Add):
            return _form_add(self.build(node.a), self.build(node.b))
        if isinstance(node, _Mul):
            return self.mul(self.build(node.a), self.build(node.b))
        if isinstance(node, _RootLeaf):
            lead = Fraction(node.coeffs[0])
            deg = len(node.coeffs) - 1
            lower = {deg - 1 - i: -Fraction(c) / lead for i, c in enumerate(node.coeffs[1:]) if c}
            return self.atom(("root", id(node)), (deg, lower))
        if isinstance(node, _SurdLeaf):
            s = node.surd
            radical = self.atom(("sqrt", s.d), (2, {0: Fraction(s.d)})) if s.q else {}
            return _form_add(self.const(Fraction(s.p, s.r)), radical, Fraction(s.q, s.r))
        if isinstance(node, _Abs):
            inner = self.build(node.a)
            if not inner:
                return {}
            try:
                lo, hi = node.a.interval(max(context.bits, 16))
            except PrecisionExhausted:
                lo = hi = Fraction(0)
            if lo > 0:
                return inner
            if hi < 0:
                return {m: -c for m, c in inner.items()}
            return self.atom(("abs", _form_key(inner)))
        if isinstance(node, _Inv):
            inner = self.build(node.a)
            if len(inner) == 1 and () in inner:
                return self.const(1 / inner[()])
            return self.atom(("inv", _form_key(inner)))
        if isinstance(node, _Sqrt):
            inner = self.build(node.a)
            if set(inner) <= {()}:
                relation = (2, {0: inner.get((), Fraction(0))})
                return self.atom(("root2", _form_key(inner)), relation)
            return self.atom(("root2", _form_key(inner)))
        return self.atom(("leaf", id(node)))


def _provably_zero(node) -> bool:
    try:
        return not _FormBuilder().build(node)
    except (_FormTooLarge, RecursionError):
        return False


class BallReal:
    """Lazily evaluated real number with certified dyadic enclosures.

    Parameters
    ----------
    node : _Node
        Expression tree describing the value.
    bits : int, optional
        Precision at which ``midpoint`` and ``radius`` are reported.
    """

    __slots__ = ("_node", "bits")

    def __init__(self, node: _Node, bits: int | None = None):
        self._node = node
        self.bits = context.bits if bits is None else bits

    # constructors ---------------------------------------------------------
    @classmethod
    def coerce(cls, x) -> "BallReal":
        if isinstance(x, BallReal):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(_Const(Fraction(x)))
        if isinstance(x, QuadraticSurd):
            if x.q == 0:
                return cls(_Const(Fraction(x.p, x.r)))
            return cls(_SurdLeaf(x))
        raise TypeError(f"cannot coerce {type(x).__name__} to BallReal")

    @classmethod
    def root(cls, coeffs: Sequence[int], lo, hi) -> "BallReal":
        """The unique root of an integer polynomial isolated in [lo, hi]."""
        return cls(_RootLeaf(coeffs, _as_fraction(lo), _as_fraction(hi)))

    @classmethod
    def from_function(cls, fn: Callable[[int], tuple]) -> "BallReal":
        """Wrap ``fn(bits) -> (lo, hi)`` returning intervals of width <= 2**-bits."""
        return cls(_FuncLeaf(fn))

    @classmethod
    def sqrt_of(cls, x) -> "BallReal":
        return cls(_Sqrt(cls.coerce(x)._node))

    # enclosure API ----------------------------------------------------------
    @property
    def exact(self) -> Fraction | None:
        return self._node.exact

    def enclosure(self, bits: int | None = None) -> tuple[Fraction, Fraction]:
        return self._node.interval(self.bits if bits is None else bits)

    @property
    def midpoint(self) -> Fraction:
        lo, hi = self.enclosure()
        return (lo + hi) / 2

    @property
    def radius(self) -> Fraction:
        lo, hi = self.enclosure()
        return (hi - lo) / 2

    def refine(self, bits: int) -> "BallReal":
        return BallReal(self._node, bits)

    def __float__(self):
        lo, hi = self._node.interval(60)
        return float((lo + hi) / 2)

    # arithmetic -------------------------------------------------------------
    @staticmethod
    def _other(x):
        if isinstance(x, (BallReal, int, Fraction, QuadraticSurd)):
            return BallReal.coerce(x)
        return None

    def _make(self, node, exact=None):
        if exact is not None:
            return BallReal(_Const(Fraction(exact)), self.bits)
        return BallReal(node, self.bits)

    def __neg__(self):
        e = self.exact
        if e is None and isinstance(self._node, _Neg):
            return self._make(self._node.a)
        return self._make(_Neg(self._node), None if e is None else -e)

    def __pos__(self):
        return self

    def __abs__(self):
        e = self.exact
        return self._make(_Abs(self._node), None if e is None else abs(e))

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if o.exact == 0:
            return self
        if self.exact == 0:
            return o
        both = self.exact is not None and o.exact is not None
        return self._make(_Add(self._node, o._node), self.exact + o.exact if both else None)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if o.exact == 0:
            return self
        if o._node is self._node:
            return self._make(None, 0)
        if self.exact == 0:
            return -o
        both = self.exact is not None and o.exact is not None
        return self._make(_Add(self._node, _Neg(o._node)), self.exact - o.exact if both else None)

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if self.exact == 0 or o.exact == 0:
            return self._make(None, 0)
        if o.exact == 1:
            return self
        if self.exact == 1:
            return o
        both = self.exact is not None and o.exact is not None
        return self._make(_Mul(self._node, o._node), self.exact * o.exact if both else None)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if o.exact == 0:
            raise ZeroDivisionError("ball division by exact zero")
        if self.exact == 0:
            return self._make(None, 0)
        if o.exact == 1:
            return self
        (cs, ks), (co, ko) = _split_scale(self._node), _split_scale(o._node)
        if ks is ko and co != 0:
            return self._make(None, cs / co)
        both = self.exact is not None and o.exact is not None
        return self._make(_Mul(self._node, _Inv(o._node)), self.exact / o.exact if both else None)

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = BallReal.coerce(1)
        for _ in range(k):
            out = out * self
        return out

    # comparison -------------------------------------------------------------
    def sign(self) -> int:
        if self._node.exact is not None:
            v = self._node.exact
            return (v > 0) - (v < 0)
        bits = max(context.bits, 16)
        tried_form = False
        while True:
            lo, hi = self._node.interval(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            if not tried_form:
                tried_form = True
                if _provably_zero(self._node):
                    return 0
            if bits >= context.max_bits:
                raise PrecisionExhausted(
                    f"sign undecided at {bits} bits (ball contains zero)")
            bits = min(2 * bits, context.max_bits)

    def _cmp(self, other) -> int:
        o = self._other(other)
        if o is None:
            raise TypeError
        if o._node is self._node:
            return 0
        return (self - o).sign()

    def __lt__(self, other):
        if self._other(other) is None:
            return NotImplemented
        return self._cmp(other) < 0

    def __le__(self, other):
        if self._other(other) is None:
            return NotImplemented
        return self._cmp(other) <= 0

    def __gt__(self, other):
        if self._other(other) is None:
            return NotImplemented
        return self._cmp(other) > 0

    def __ge__(self, other):
        if self._other(other) is None:
            return NotImplemented
        return self._cmp(other) >= 0

    def __eq__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        if o._node is self._node:
            return True
        if self.exact is not None and o.exact is not None:
            return self.exact == o.exact
        return self._cmp(o) == 0  # raises when undecidable

    __hash__ = None

    def __bool__(self):
        return self.sign() != 0

    def __repr__(self):
        return f"BallReal({format_real(self)})"


def ball_refine(x: BallReal, bits: int) -> BallReal:
    """Return ``x`` with reported precision ``bits`` (radius <= 2**-bits)."""
    if bits < 1:
        raise ValueError("bits must be >= 1")
    return BallReal.coerce(x).refine(bits)


# ---------------------------------------------------------------------------
# generic helpers over the tiers

def sign(x) -> int:
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    return x.sign()


def compare(x, y) -> int:
    return sign(x - y)


def real_floor(x) -> int:
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return math.floor(x)
    if isinstance(x, QuadraticSurd):
        return x.floor()
    bits = max(context.bits, 16)
    while True:
        lo, hi = x.enclosure(bits)
        if math.floor(lo) == math.floor(hi) and not (hi == math.floor(hi) and lo < hi):
            return math.floor(lo)
        if bits >= context.max_bits:
            raise PrecisionExhausted("floor undecided")
        bits = min(2 * bits, context.max_bits)


def real_ceil(x) -> int:
    return -real_floor(-x)


def enclose(x, bits: int) -> tuple[Fraction, Fraction]:
    if isinstance(x, (int, Fraction)):
        v = Fraction(x)
        return v, v
    return x.enclosure(bits)


def rational_below(x, bits: int) -> Fraction:
    """A rational number <= x within 2**-bits of it."""
    return enclose(x, bits)[0]


def rational_above(x, bits: int) -> Fraction:
    return enclose(x, bits)[1]


def simplify(x):
    """Lowest exact tier.  Rational surds and exact balls collapse to
    Fraction; a whole Fraction is kept as Fraction so that later divisions
    stay exact."""
    if isinstance(x, QuadraticSurd):
        return x.simplify()
    if isinstance(x, BallReal) and x.exact is not None:
        return Fraction(x.exact)
    return x


def rdiv(a, b):
    """Division that keeps integers exact."""
    if isinstance(a, (int, Fraction)) and a == 0:
        return Fraction(0)
    if isinstance(a, int) and isinstance(b, int):
        return Fraction(a, b)
    return a / b


def real_sqrt(x):
    """Square root in the lowest tier that represents it exactly."""
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        if x < 0:
            raise ValueError("square root of negative rational")
        n, d = x.numerator, x.denominator
        rn, rd = isqrt(n), isqrt(d)
        if rn * rn == n and rd * rd == d:
            return Fraction(rn, rd)
        return QuadraticSurd.sqrt(x)
    if isinstance(x, QuadraticSurd) and x.q == 0:
        return real_sqrt(Fraction(x.p, x.r))
    return BallReal.sqrt_of(x)


def format_real(x, digits: int = 30) -> str:
    """Exact string for rationals and surds, decimal ball otherwise."""
    x = simplify(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    if isinstance(x, QuadraticSurd):
        return str(x)
    bits = int(digits * 3.33) + 8
    lo, hi = x.enclosure(bits)
    mid = (lo + hi) / 2
    rad = (hi - lo) / 2
    return f"{decimal_string(mid, digits)}+/-{float(rad):.1e}"


def decimal_string(x: Fraction, digits: int) -> str:
    """Round ``x`` to ``digits`` significant decimal digits (half-even)."""
    x = Fraction(x)
    if x == 0:
        return "0"
    neg = x < 0
    x = abs(x)
    e = len(str(x.numerator)) - len(str(x.denominator))
    if Fraction(10) ** e > x:
        e -= 1
    scaled = x / Fraction(10) ** (e - digits + 1)
    n = round(scaled)
    if n >= 10 ** digits:
        n //= 10
        e += 1
    s = str(n).rjust(digits, "0")
    point = e + 1
    if 0 < point <= digits:
        body = s[:point] + ("." + s[point:] if s[point:] else "")
    elif point <= 0:
        body = "0." + "0" * (-point) + s
    else:
        body = s + "0" * (point - digits)
    if "." in body:
        body = body.rstrip("0").rstrip(".")
    return ("-" if neg else "") + body


# ---------------------------------------------------------------------------
# complex numbers over the real tiers

class CNum:
    """Complex number ``re + I*im`` with components in any real tier."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = simplify(re)
        self.im = simplify(im)

    @classmethod
    def coerce(cls, x) -> "CNum":
        return x if isinstance(x, CNum) else cls(x, 0)

    @property
    def is_real(self) -> bool:
        return _is_zero(self.im)

    @property
    def is_imaginary(self) -> bool:
        return _is_zero(self.re)

    def is_zero(self) -> bool:
        return _is_zero(self.re) and _is_zero(self.im)

    def conjugate(self) -> "CNum":
        return CNum(self.re, -self.im)

    def abs2(self):
        return simplify(self.re * self.re + self.im * self.im)

    def modulus(self):
        if _is_zero(self.im):
            return simplify(abs(self.re))
        if _is_zero(self.re):
            return simplify(abs(self.im))
        return real_sqrt(self.abs2())

    def __neg__(self):
        return CNum(-self.re, -self.im)

    def __add__(self, other):
        o = _cnum_or_none(other)
        if o is None:
            return NotImplemented
        return CNum(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _cnum_or_none(other)
        if o is None:
            return NotImplemented
        return CNum(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _cnum_or_none(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _cnum_or_none(other)
        if o is None:
            return NotImplemented
        if _is_zero(o.im):
            return CNum(self.re * o.re, self.im * o.re)
        if _is_zero(self.im):
            return CNum(self.re * o.re, self.re * o.im)
        return CNum(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _cnum_or_none(other)
        if o is None:
            return NotImplemented
        if _is_zero(o.im):
            return CNum(rdiv(self.re, o.re), rdiv(self.im, o.re))
        n = o.abs2()
        num = self * o.conjugate()
        return CNum(rdiv(num.re, n), rdiv(num.im, n))

    def __rtruediv__(self, other):
        o = _cnum_or_none(other)
        if o is None:
            return NotImplemented
        return o / self

    def __eq__(self, other):
        o = _cnum_or_none(other)
        if o is None:
            return NotImplemented
        return compare(self.re, o.re) == 0 and compare(self.im, o.im) == 0

    __hash__ = None

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"CNum({format_real(self.re)}, {format_real(self.im)})"

    def __str__(self):
        return format_complex(self)


def _is_zero(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    if isinstance(x, QuadraticSurd):
        return not x
    if isinstance(x, BallReal):
        return x.exact is not None and x.exact == 0
    return x == 0


def _cnum_or_none(x):
    if isinstance(x, CNum):
        return x
    if isinstance(x, (int, Fraction, QuadraticSurd, BallReal)):
        return CNum(x, 0)
    return None


def format_complex(z, digits: int = 30) -> str:
    z = CNum.coerce(z)
    if _is_zero(z.im):
        return format_real(z.re, digits)
    im = format_real(z.im, digits)
    if _is_zero(z.re):
        return f"{im}*I"
    return f"{format_real(z.re, digits)} + ({im})*I"


# ---------------------------------------------------------------------------
# Gaussian integers and vectors

Gauss = tuple  # (a, b) meaning a + I*b


def g_mul(x: Gauss, y: Gauss) -> Gauss:
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def g_norm(x: Gauss) -> int:
    return x[0] * x[0] + x[1] * x[1]


def g_divmod(x: Gauss, y: Gauss) -> tuple[Gauss, Gauss]:
    """Division with remainder of norm < norm(y) (nearest-integer quotient)."""
    n = g_norm(y)
    if n == 0:
        raise ZeroDivisionError("Gaussian division by zero")
    num = g_mul(x, (y[0], -y[1]))
    # round half up, exact integer arithmetic
    q = ((2 * num[0] + n) // (2 * n), (2 * num[1] + n) // (2 * n))
    qy = g_mul(q, y)
    return q, (x[0] - qy[0], x[1] - qy[1])


def g_gcd(x: Gauss, y: Gauss) -> Gauss:
    while y != (0, 0):
        _, r = g_divmod(x, y)
        x, y = y, r
    return x


def g_exact_div(x: Gauss, y: Gauss) -> Gauss:
    q, r = g_divmod(x, y)
    if r != (0, 0):
        raise ValueError("inexact Gaussian division")
    return q


UNITS: tuple[Gauss, ...] = ((1, 0), (0, 1), (-1, 0), (0, -1))


def canonical_unit_for(x: Gauss) -> Gauss:
    """The unit u with u*x in the quadrant re > 0, im >= 0."""
    for u in UNITS:
        a, b = g_mul(u, x)
        if a > 0 and b >= 0:
            return u
    raise ValueError("zero has no canonical unit")


@dataclass(frozen=True)
class GaussianVector:
    """Vector of Gaussian integers; ``coords`` holds pairs ``(a, b)`` for a+Ib."""

    coords: tuple[Gauss, ...]

    @classmethod
    def of(cls, values: Iterable) -> "GaussianVector":
        out = []
        for v in values:
            if isinstance(v, tuple):
                out.append((int(v[0]), int(v[1])))
            elif isinstance(v, complex):
                out.append((int(v.real), int(v.imag)))
            else:
                out.append((int(v), 0))
        return cls(tuple(out))

    def norm2(self) -> int:
        """Square of the max-coordinate-modulus norm."""
        return max(g_norm(c) for c in self.coords)

    def norm(self):
        return real_sqrt(self.norm2())

    @property
    def is_real(self) -> bool:
        return all(c[1] == 0 for c in self.coords)

    def is_zero(self) -> bool:
        return all(c == (0, 0) for c in self.coords)

    def scale(self, u: Gauss) -> "GaussianVector":
        return GaussianVector(tuple(g_mul(u, c) for c in self.coords))

    def conjugate(self) -> "GaussianVector":
        return GaussianVector(tuple((a, -b) for a, b in self.coords))

    def as_cnums(self) -> tuple[CNum, ...]:
        return tuple(CNum(a, b) for a, b in self.coords)

    def __str__(self):
        return "(" + ", ".join(format_gauss(c) for c in self.coords) + ")"


def format_gauss(c: Gauss) -> str:
    a, b = c
    if b == 0:
        return str(a)
    if a == 0:
        return "I" if b == 1 else "-I" if b == -1 else f"{b}I"
    sgn = "+" if b > 0 else "-"
    mag = "" if abs(b) == 1 else str(abs(b))
    return f"{a}{sgn}{mag}I"


def gaussian_primitive(v: GaussianVector) -> GaussianVector:
    """Divide out the Gaussian gcd and fix the unit.

    The first nonzero coordinate of the result has argument in [0, pi/2).
    """
    if not isinstance(v, GaussianVector):
        v = GaussianVector.of(v)
    if v.is_zero():
        raise ValueError("zero vector has no primitive representative")
    g: Gauss = (0, 0)
    for c in v.coords:
        g = g_gcd(c, g) if g != (0, 0) else c
        if g_norm(g) == 1:
            break
    coords = tuple(g_exact_div(c, g) if c != (0, 0) else (0, 0) for c in v.coords)
    first = next(c for c in coords if c != (0, 0))
    u = canonical_unit_for(first)
    return GaussianVector(tuple(g_mul(u, c) for c in coords))


def integer_primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries (sign kept)."""
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(x // g for x in v)

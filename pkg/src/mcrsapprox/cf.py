"""Continued fractions, convergents and best approximations in an N x N box."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Iterator

from .numeric import (BallReal, PrecisionExhausted, QuadraticSurd, compare,
                      context, simplify, sign)


class UndecidableDigit(PrecisionExhausted):
    def __init__(self, index: int):
        super().__init__(f"undecidable digit at position {index}")
        self.index = index


@dataclass(frozen=True)
class Convergent:
    m: int
    n: int
    index: int
    semi: bool = False

    @property
    def value(self) -> Fraction:
        return Fraction(self.m, self.n)

    def __str__(self):
        return f"{self.m}/{self.n}"


@dataclass(frozen=True)
class ContinuedFraction:
    """Terms of a regular continued fraction.

    For ``kind == "periodic"`` the expansion is ``preperiod`` followed by
    ``period`` repeated forever and ``terms`` holds a finite prefix.
    """

    terms: tuple[int, ...]
    kind: str  # "finite" | "periodic" | "streamed"
    preperiod: tuple[int, ...] = ()
    period: tuple[int, ...] = ()
    truncated: bool = False

    def convergents(self) -> list[Convergent]:
        return list(convergents(self.terms))

    def __str__(self):
        if self.kind == "periodic":
            pre = " ".join(map(str, self.preperiod))
            per = " ".join(map(str, self.period))
            return f"[{pre}; ({per})]" if pre else f"[({per})]"
        body = " ".join(map(str, self.terms))
        return f"[{body}{' ...' if self.truncated else ''}]"


def convergents(terms) -> Iterator[Convergent]:
    h1, h2 = 1, 0
    k1, k2 = 0, 1
    for i, a in enumerate(terms):
        h1, h2 = a * h1 + h2, h1
        k1, k2 = a * k1 + k2, k1
        yield Convergent(h1, k1, i)


def evaluate(terms) -> Fraction:
    value = None
    for a in reversed(list(terms)):
        value = Fraction(a) if value is None else a + 1 / value
    if value is None:
        raise ValueError("empty continued fraction")
    return value


# ---------------------------------------------------------------------------
# term generators

def _rational_terms(x: Fraction) -> Iterator[int]:
    p, q = x.numerator, x.denominator
    while q:
        a = p // q
        yield a
        p, q = q, p - a * q


def _surd_state(x: QuadraticSurd) -> tuple[int, int, int]:
    """Write x as (P + sqrt(D))/Q with Q dividing D - P*P."""
    p, q, r, d = x.p, x.q, x.r, x.d
    if q < 0:
        p, r = -p, -r
    D = q * q * d
    P, Q = p, r
    if (D - P * P) % Q:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    return P, Q, D


def _surd_expansion(x: QuadraticSurd) -> tuple[list[int], int]:
    """All terms up to the first repeated state and the period start."""
    P, Q, D = _surd_state(x)
    from math import isqrt
    root = isqrt(D)
    seen: dict[tuple[int, int], int] = {}
    terms: list[int] = []
    while (P, Q) not in seen:
        seen[(P, Q)] = len(terms)
        # floor((P + sqrt D)/Q), exact for both signs of Q
        if Q > 0:
            a = (P + root) // Q
        else:
            a = (P + root + 1) // Q
        terms.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    return terms, seen[(P, Q)]


def _ball_terms(x: BallReal) -> Iterator[int]:
    emitted: list[int] = []
    bits = max(context.bits, 64)
    while True:
        lo, hi = x.enclosure(bits)
        produced = 0
        stuck = False
        while True:
            a = floor(lo)
            if floor(hi) != a:
                stuck = True
                break
            if produced < len(emitted):
                if emitted[produced] != a:
                    raise AssertionError("non-deterministic digit")
            else:
                emitted.append(a)
                yield a
            produced += 1
            flo, fhi = lo - a, hi - a
            if flo == 0:
                stuck = True  # the value may be the integer a
                break
            lo, hi = 1 / fhi, 1 / flo
        if not stuck:
            return
        if bits >= context.max_bits:
            raise UndecidableDigit(len(emitted))
        bits = min(2 * bits, context.max_bits)


def cf_terms(x) -> Iterator[int]:
    """Lazy regular continued fraction terms of any real tier."""
    x = simplify(x)
    if isinstance(x, (int, Fraction)):
        yield from _rational_terms(Fraction(x))
    elif isinstance(x, QuadraticSurd):
        terms, start = _surd_expansion(x)
        yield from terms[:start]
        period = terms[start:]
        while True:
            yield from period
    elif isinstance(x, BallReal):
        yield from _ball_terms(x)
    else:
        raise TypeError(f"unsupported value type {type(x).__name__}")


def cf_expand(x, max_terms: int = 20) -> ContinuedFraction:
    """Canonical continued fraction of ``x``.

    Rationals give a finite expansion whose last term is at least 2,
    quadratic surds give the exact preperiod and period, ball reals are
    streamed digit by digit and fail with :class:`UndecidableDigit` rather
    than guess.
    """
    if max_terms < 1:
        raise ValueError("max_terms must be >= 1")
    x = simplify(x)
    if isinstance(x, (int, Fraction)):
        terms = list(_rational_terms(Fraction(x)))
        return ContinuedFraction(tuple(terms[:max_terms]), "finite",
                                 truncated=len(terms) > max_terms)
    if isinstance(x, QuadraticSurd):
        terms, start = _surd_expansion(x)
        pre, per = tuple(terms[:start]), tuple(terms[start:])
        prefix = []
        gen = cf_terms(x)
        for _ in range(max_terms):
            prefix.append(next(gen))
        return ContinuedFraction(tuple(prefix), "periodic", pre, per, truncated=True)
    out = []
    for a in _ball_terms(x):
        out.append(a)
        if len(out) >= max_terms:
            break
    return ContinuedFraction(tuple(out), "streamed", truncated=True)


# ---------------------------------------------------------------------------
# best approximation inside the box |m| <= N, 1 <= n <= N

def _abs_error(x, m: int, n: int):
    return abs(x - Fraction(m, n))


def best_dioph_in_box(x, N: int) -> tuple[Convergent, Convergent | None]:
    """Closest fraction m/n to x with |m| <= N and 1 <= n <= N.

    Returns ``(best, next)``.  ``next`` is the first fraction along the
    Stern-Brocot path of x that is strictly closer than ``best`` (it
    necessarily leaves the box); it is None when ``best`` equals x.
    Ties between the two box neighbours are broken towards the smaller
    denominator.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    x = simplify(x)
    flip = sign(x) < 0
    y = -x if flip else x

    def out(m, n, idx, semi):
        return Convergent(-m if flip else m, n, idx, semi)

    h1, h2 = 1, 0  # h_{k-1}, h_{k-2}
    k1, k2 = 0, 1
    gen = cf_terms(y)
    idx = 0
    for a in gen:
        # candidates (h2 + t*h1)/(k2 + t*k1), t = 1..a
        limits = [a]
        if k1:
            limits.append((N - k2) // k1)
        if h1:
            limits.append((N - h2) // h1)
        t_max = min(limits)
        if t_max >= a:
            h1, h2 = a * h1 + h2, h1
            k1, k2 = a * k1 + k2, k1
            idx += 1
            continue
        # box neighbours: h1/k1 (last convergent) and the t_max semiconvergent
        left = (h1, k1)
        right = (h2 + t_max * h1, k2 + t_max * k1)
        if left[1] == 0:
            best = right
        elif right[1] == 0:
            best = left
        else:
            c = compare(_abs_error(y, *left), _abs_error(y, *right))
            if c == 0:
                best = left if left[1] <= right[1] else right
            else:
                best = left if c < 0 else right
        best_err = _abs_error(y, *best)
        # next: first semiconvergent with t in (t_max, a] closer than best
        lo_t, hi_t = t_max + 1, a
        while lo_t < hi_t:
            mid = (lo_t + hi_t) // 2
            if compare(_abs_error(y, h2 + mid * h1, k2 + mid * k1), best_err) < 0:
                hi_t = mid
            else:
                lo_t = mid + 1
        t = lo_t
        nxt = (h2 + t * h1, k2 + t * k1)
        best_c = out(best[0], best[1], idx - (0 if best is right else 1), best is right and t_max > 0)
        next_c = out(nxt[0], nxt[1], idx, t < a)
        return best_c, next_c
    # rational x whose every convergent fits in the box
    return out(h1, k1, idx - 1, False), None


# ---------------------------------------------------------------------------
# the classical best-approximation sequence

def classical_best_sequence(alpha, finite: bool | None = None,
                            max_terms: int = 40) -> list[Convergent]:
    """Truncations [0; a1, ..., al] of alpha in [0, 1].

    For a finite expansion [0; a1, ..., ak] the fraction
    [0; a1, ..., a_{k-1}, a_k - 1] is appended.  Infinite expansions are
    cut after ``max_terms`` truncations.
    """
    alpha = simplify(alpha)
    if sign(alpha) < 0 or compare(alpha, 1) > 0:
        raise ValueError("alpha must lie in [0, 1]")
    if sign(alpha) == 0:
        return [Convergent(0, 1, 0)]
    if compare(alpha, 1) == 0:
        return [Convergent(1, 1, 1)]
    is_finite = isinstance(alpha, (int, Fraction))
    if finite is not None and finite != is_finite:
        raise ValueError("finite flag contradicts the value")
    terms = []
    for a in cf_terms(alpha):
        terms.append(a)
        if len(terms) > max_terms:
            break
    out = [c for c in convergents(terms) if c.index >= 1][:max_terms]
    if is_finite:
        k = len(terms) - 1
        last = terms[:-1] + [terms[-1] - 1]
        m, n = evaluate(last).numerator, evaluate(last).denominator
        out.append(Convergent(m, n, k, semi=True))
    return out

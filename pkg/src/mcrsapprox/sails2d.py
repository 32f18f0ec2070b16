"""Sails, k-sails and geometric continued fractions of plane cones.

All predicates are exact: cone rays carry rational or quadratic-surd
components, lattice points are integers, and the only operations are
cross products, floors and comparisons in those tiers.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import Sequence

from .numeric import CNum, compare, real_ceil, real_floor, sign, simplify


class DegenerateCone(ValueError):
    def __init__(self):
        super().__init__("degenerate cone")


class BoxExhausted(ValueError):
    def __init__(self, detail=""):
        super().__init__("box exhausted" + (f": {detail}" if detail else ""))


Point = tuple[int, int]


def cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _real(x):
    """Plane ray components must be real (rational or surd)."""
    if isinstance(x, CNum):
        if not x.is_real:
            raise ValueError("cone rays must be real")
        x = x.re
    return simplify(x)


@dataclass(frozen=True, eq=False)
class Cone2:
    """The closed cone spanned by two rays, oriented counterclockwise."""

    ray1: tuple
    ray2: tuple

    @classmethod
    def of(cls, r1: Sequence, r2: Sequence) -> "Cone2":
        r1 = tuple(_real(c) for c in r1)
        r2 = tuple(_real(c) for c in r2)
        s = sign(cross(r1, r2))
        if s == 0:
            raise DegenerateCone()
        if s < 0:
            r1, r2 = r2, r1
        return cls(r1, r2)

    def contains(self, p) -> bool:
        return sign(cross(self.ray1, p)) >= 0 and sign(cross(p, self.ray2)) >= 0

    def on_ray(self, p, which: int) -> bool:
        r = self.ray1 if which == 1 else self.ray2
        return sign(cross(r, p)) == 0 and sign(r[0] * p[0] + r[1] * p[1]) > 0

    def ray_point(self, which: int) -> Point | None:
        """Primitive integer point on a rational ray, None if irrational."""
        r = self.ray1 if which == 1 else self.ray2
        if not all(isinstance(c, (int, Fraction)) for c in r):
            return None
        den = Fraction(r[0]).denominator * Fraction(r[1]).denominator
        a, b = int(Fraction(r[0]) * den), int(Fraction(r[1]) * den)
        g = gcd(a, b)
        return (a // g, b // g)

    def column(self, x: int, box: int) -> tuple[int, int] | None:
        """Integer range of y with (x, y) in the cone, |y| <= box, origin excluded."""
        lo, hi = -box, box
        for r, lower_if_positive in ((self.ray1, True), (self.ray2, False)):
            # ray1: r.x*y - r.y*x >= 0 ; ray2: r.y*x - r.x*y >= 0
            coef = r[0] if lower_if_positive else -r[0]
            rhs = r[1] * x if lower_if_positive else -r[1] * x
            s = sign(coef)
            if s == 0:
                if sign(-rhs) < 0:
                    return None
                continue
            bound = simplify(rhs / coef) if not isinstance(rhs, int) or not isinstance(coef, int) \
                else Fraction(rhs, coef)
            if s > 0:
                lo = max(lo, real_ceil(bound))
            else:
                hi = min(hi, real_floor(bound))
        if x == 0:
            if lo <= 0 <= hi:
                if lo < 0 < hi:
                    raise DegenerateCone()
                if lo == 0:
                    lo = 1
                else:
                    hi = -1
        if lo > hi:
            return None
        return lo, hi


def _angle_cmp(p: Point, q: Point) -> int:
    c = cross(p, q)
    return -1 if c > 0 else (1 if c < 0 else 0)


def _norm_inf(p: Point) -> int:
    return max(abs(p[0]), abs(p[1]))


def near_chain(points: Sequence[Point]) -> list[Point]:
    """Vertices of the part of the convex hull of ``points`` that faces the
    origin; the points must lie in a cone of angle less than pi."""
    pts = sorted(set(points), key=cmp_to_key(lambda p, q: _angle_cmp(p, q) or (_norm_inf(p) - _norm_inf(q))))
    # keep the nearest point per direction
    uniq: list[Point] = []
    for p in pts:
        if uniq and cross(uniq[-1], p) == 0:
            continue
        uniq.append(p)
    stack: list[Point] = []
    for p in uniq:
        while len(stack) >= 2 and cross(_sub(stack[-1], stack[-2]), _sub(p, stack[-1])) >= 0:
            stack.pop()
        stack.append(p)
    return stack


def edge_points(a: Point, b: Point) -> list[Point]:
    """Lattice points on the closed segment from a to b, in order."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    g = gcd(dx, dy)
    if g == 0:
        return [a]
    sx, sy = dx // g, dy // g
    return [(a[0] + k * sx, a[1] + k * sy) for k in range(g + 1)]


@dataclass
class SailPolyline:
    """A (truncated) k-sail.

    ``certified[i]`` tells whether vertex i is a vertex of the infinite sail
    (not an artifact of the box); ``ray_head``/``ray_tail`` mark terminal
    vertices lying on a rational boundary ray, beyond which the sail
    continues along the ray.
    """

    vertices: list[Point]
    level: int
    certified: list[bool]
    edge_certified: list[bool]
    ray_head: bool = False
    ray_tail: bool = False
    periodic_shift: tuple | None = None
    period: list[Point] | None = None

    @property
    def head_artifact(self) -> bool:
        return bool(self.vertices) and not self.certified[0]

    @property
    def tail_artifact(self) -> bool:
        return bool(self.vertices) and not self.certified[-1]

    def points(self) -> list[Point]:
        """All lattice points of the compact part, in order."""
        if len(self.vertices) == 1:
            return list(self.vertices)
        out: list[Point] = []
        for a, b in zip(self.vertices, self.vertices[1:]):
            seg = edge_points(a, b)
            out.extend(seg if not out else seg[1:])
        return out

    def certified_vertices(self) -> list[Point]:
        return [v for v, c in zip(self.vertices, self.certified) if c]

    def to_json(self) -> dict:
        d = {"level": self.level,
             "vertices": [list(v) for v in self.vertices],
             "certified": list(self.certified),
             "ray_head": self.ray_head, "ray_tail": self.ray_tail,
             "head_artifact": self.head_artifact, "tail_artifact": self.tail_artifact}
        if self.periodic_shift is not None:
            d["shift"] = [list(r) for r in self.periodic_shift]
            d["period"] = [list(v) for v in (self.period or [])]
        return d


# ---------------------------------------------------------------------------
# peeling

def _ray_param(cone: Cone2, a: Point, b: Point, which: int):
    """t with t*ray on the line through a and b (None when parallel)."""
    r = cone.ray1 if which == 1 else cone.ray2
    d = _sub(b, a)
    den = cross(d, r)
    if sign(den) == 0:
        return None
    num = cross(d, a)
    return simplify(num / den) if not (isinstance(num, int) and isinstance(den, int)) else Fraction(num, den)


def _triangle_in_box(cone: Cone2, a: Point, b: Point, box: int):
    """The cone region on the origin side of line ab, as the triangle
    (0, t1*r1, t2*r2), if it is bounded and inside the box."""
    t1 = _ray_param(cone, a, b, 1)
    t2 = _ray_param(cone, a, b, 2)
    if t1 is None or t2 is None or sign(t1) <= 0 or sign(t2) <= 0:
        return False
    for t, r in ((t1, cone.ray1), (t2, cone.ray2)):
        for c in r:
            if compare(abs(t * c), box) > 0:
                return False
    return True


def _strictly_inside(a: Point, b: Point, p: Point) -> bool:
    """p lies strictly on the origin side of the line through a and b."""
    d = _sub(b, a)
    side = cross(d, _sub(p, a))
    origin = cross(d, (-a[0], -a[1]))
    return side != 0 and (side > 0) == (origin > 0)


def _same_direction(p: Point, q: Point) -> bool:
    return cross(p, q) == 0 and p[0] * q[0] + p[1] * q[1] > 0


def _sector_overlaps(edge: tuple[Point, Point], bad: tuple) -> bool:
    """Does the counterclockwise sector of ``edge`` meet a suspect sector?

    Open sectors are compared; a shared boundary ray only counts when the
    suspect side's vertex on it is itself uncertified (a certified vertex
    pins down every earlier layer along that ray).
    """
    (a1, b1), (a2, b2, a2_ok, b2_ok) = edge, bad
    if a2 == b2:  # a single suspect point
        return cross(a1, a2) >= 0 and cross(a2, b1) >= 0
    if (_same_direction(b1, a2) and not a2_ok) or (_same_direction(a1, b2) and not b2_ok):
        return True
    return not (cross(b1, a2) >= 0 or cross(b2, a1) >= 0)


class _Peeler:
    def __init__(self, cone: Cone2, box: int):
        if box < 1:
            raise BoxExhausted("box must be >= 1")
        self.cone = cone
        self.box = box
        self.columns: dict[int, list[int]] = {}
        for x in range(-box, box + 1):
            rng = cone.column(x, box)
            if rng is not None:
                self.columns[x] = [rng[0], rng[1]]
        self.level = 0
        self.bad_sectors: list[tuple] = []
        self.bad_removed: list[Point] = []
        self.ray_pts = (cone.ray_point(1), cone.ray_point(2))

    def _extremes(self) -> list[Point]:
        pts = []
        for x, (lo, hi) in self.columns.items():
            if lo <= hi:
                pts.append((x, lo))
                if hi != lo:
                    pts.append((x, hi))
        return pts

    def next_layer(self) -> SailPolyline:
        self.level += 1
        pts = self._extremes()
        if not pts:
            raise BoxExhausted(f"no lattice points left for level {self.level}")
        chain = near_chain(pts)
        k = self.level
        cone, box = self.cone, self.box
        ray_head = self.ray_pts[0] is not None and cone.on_ray(chain[0], 1)
        ray_tail = self.ray_pts[1] is not None and cone.on_ray(chain[-1], 2)
        edge_ok = []
        for a, b in zip(chain, chain[1:]):
            ok = _triangle_in_box(cone, a, b, box)
            if ok and self.bad_sectors:
                ok = not any(_sector_overlaps((a, b), s) for s in self.bad_sectors)
            if ok and self.bad_removed:
                ok = not any(_strictly_inside(a, b, p) for p in self.bad_removed)
            edge_ok.append(ok)
        n = len(chain)
        cert = []
        for i in range(n):
            left = edge_ok[i - 1] if i > 0 else None
            right = edge_ok[i] if i < n - 1 else None
            if left is not None and right is not None:
                cert.append(left and right)
            elif n == 1:
                cert.append(False)
            elif i == 0:
                cert.append(bool(right) and ray_head)
            else:
                cert.append(bool(left) and ray_tail)
        poly = SailPolyline(chain, k, cert, edge_ok, ray_head, ray_tail)
        # remove the lattice points of the compact part
        for idx, (a, b) in enumerate(zip(chain, chain[1:])):
            seg = edge_points(a, b)
            for p in seg:
                self._remove(p)
            if not edge_ok[idx]:
                self.bad_sectors.append((a, b, cert[idx], cert[idx + 1]))
                self.bad_removed.extend(q for q, ok in ((a, cert[idx]), (b, cert[idx + 1])) if not ok)
                self.bad_removed.extend(seg[1:-1])
        if n == 1:
            self._remove(chain[0])
            self.bad_sectors.append((chain[0], chain[0], False, False))
            self.bad_removed.append(chain[0])
        return poly

    def _remove(self, p: Point) -> None:
        col = self.columns.get(p[0])
        if col is None:
            return
        lo, hi = col
        if p[1] == lo:
            col[0] = lo + 1
        elif p[1] == hi:
            col[1] = hi - 1
        elif lo < p[1] < hi:
            raise AssertionError("peeled point is not a column extreme")


def sail(cone: Cone2, box: int) -> SailPolyline:
    """The 1-sail of the cone truncated to the box [-box, box]^2."""
    return _Peeler(cone, box).next_layer()


def k_sail(cone: Cone2, k: int, box: int) -> SailPolyline:
    """The k-th layer of iterated hull peeling (the k-sail)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    peeler = _Peeler(cone, box)
    poly = None
    for _ in range(k):
        poly = peeler.next_layer()
    return poly


def k_sails(cone: Cone2, k: int, box: int) -> list[SailPolyline]:
    """Layers 1..k in one peeling pass."""
    peeler = _Peeler(cone, box)
    return [peeler.next_layer() for _ in range(k)]


# ---------------------------------------------------------------------------
# geometric continued fractions

def _real_direction(line) -> tuple:
    return tuple(_real(c) for c in line.direction)


def group_cones(A) -> list[Cone2]:
    """The four cones cut by the two real eigenlines of a plane group."""
    if A.n != 2 or A.spectrum_tag != "hyperbolic":
        raise ValueError("geometric continued fractions need a hyperbolic plane group")
    d1 = _real_direction(A.lines[0])
    d2 = _real_direction(A.lines[1])
    if sign(cross(d1, d2)) < 0:
        d2 = tuple(-c for c in d2)
    neg = lambda v: tuple(-c for c in v)
    return [Cone2.of(d1, d2), Cone2.of(d2, neg(d1)), Cone2.of(neg(d1), neg(d2)), Cone2.of(neg(d2), d1)]


def periodic_shift(A) -> tuple | None:
    """An integer matrix of the group mapping each of the four cones to itself."""
    M = A.source
    if M is None:
        return None
    (a, b), (c, d) = M
    if abs(a * d - b * c) != 1:
        return None
    s = [sign(e.re if isinstance(e, CNum) else e) for e in A.eigenvalues]
    if s[0] > 0 and s[1] > 0:
        return M
    if s[0] < 0 and s[1] < 0:
        return tuple(tuple(-v for v in row) for row in M)
    return ((a * a + b * c, a * b + b * d), (c * a + d * c, c * b + d * d))


def _apply(M, p: Point) -> Point:
    return (M[0][0] * p[0] + M[0][1] * p[1], M[1][0] * p[0] + M[1][1] * p[1])


def _attach_period(poly: SailPolyline, shift) -> bool:
    verts = poly.certified_vertices()
    index = {v: i for i, v in enumerate(poly.vertices)}
    for v in verts:
        w = _apply(shift, v)
        if w in index and w != v:
            i, j = index[v], index[w]
            lo, hi = (i, j) if i < j else (j, i)
            if all(poly.certified[lo:hi + 1]):
                poly.periodic_shift = shift
                poly.period = poly.vertices[lo:hi]
                return True
    return False


def geometric_cf(A, k: int, box: int) -> list[SailPolyline]:
    """k-sails of the four cones cut by the eigenlines of A."""
    if box < 1:
        raise BoxExhausted("box must be >= 1")
    shift = periodic_shift(A) if not A.is_rational else None
    out = []
    for cone in group_cones(A):
        poly = k_sail(cone, k, box)
        if shift is not None:
            _attach_period(poly, shift)
        out.append(poly)
    return out


# ---------------------------------------------------------------------------
# level of a lattice point and Markoff minimum

def _cone_of(A, v: Point) -> Cone2:
    for cone in group_cones(A):
        if cone.contains(v):
            return cone
    raise AssertionError("point outside all four cones")


def _level_in(poly: SailPolyline, cone: Cone2, v: Point):
    """Sail functional of v relative to the certified 1-sail, or None when
    the relevant sector is not certified inside this box."""
    verts = poly.vertices
    if poly.ray_head and cone.on_ray(v, 1):
        p = verts[0]
        return Fraction(_norm_inf(v), _norm_inf(p)) if poly.certified[0] or len(verts) == 1 else None
    if poly.ray_tail and cone.on_ray(v, 2):
        p = verts[-1]
        return Fraction(_norm_inf(v), _norm_inf(p)) if poly.certified[-1] or len(verts) == 1 else None
    for i, (a, b) in enumerate(zip(verts, verts[1:])):
        if cross(a, v) >= 0 and cross(v, b) >= 0:
            if not poly.edge_certified[i]:
                return None
            det = cross(a, b)
            s = Fraction(cross(v, b), det)
            t = Fraction(cross(a, v), det)
            return s + t
    return None


def _reduce_by_shift(A, v: Point) -> Point:
    """Move v along the orbit of the periodic shift to a short representative.
    The shift maps every k-sail of its cone onto itself, so levels agree."""
    shift = periodic_shift(A) if not A.is_rational else None
    if shift is None:
        return v
    (a, b), (c, d) = shift
    inverse = ((d, -b), (-c, a))
    for M in (inverse, shift):
        while True:
            w = _apply(M, v)
            if _norm_inf(w) >= _norm_inf(v):
                break
            v = w
    return v


def sail_membership_level(A, v: Sequence[int], max_box: int = 1 << 16) -> int:
    """The k such that v lies on the k-geometric continued fraction of A."""
    v = (int(v[0]), int(v[1]))
    if v == (0, 0):
        raise ValueError("zero vector has no sail level")
    v = _reduce_by_shift(A, v)
    cone = _cone_of(A, v)
    box = max(8, 4 * _norm_inf(v))
    while box <= max_box:
        poly = sail(cone, box)
        level = _level_in(poly, cone, v)
        if level is not None:
            if level.denominator != 1:
                raise AssertionError(f"non-integral sail level {level}")
            return int(level)
        box *= 2
    raise BoxExhausted(f"sector of {v} not certified within box {max_box}")


def markoff_minimum_from_sails(A, max_box: int = 1 << 14):
    """min |Phi_A| over one period of each 1-sail of an algebraic group."""
    from .mcrs import md_form
    shift = periodic_shift(A)
    if shift is None:
        raise ValueError("group has no unimodular source matrix")
    form = md_form(A)
    best = None
    for cone in group_cones(A):
        box = 16
        while True:
            poly = sail(cone, box)
            if _attach_period(poly, shift):
                break
            box *= 2
            if box > max_box:
                raise BoxExhausted("period not found")
        for p in poly.period:
            val = form.evaluate((CNum(p[0]), CNum(p[1]))).modulus()
            if best is None or compare(val, best) < 0:
                best = val
    return simplify(best)

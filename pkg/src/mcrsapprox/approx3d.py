"""Simultaneous approximation of a real direction in 3-space.

A direction ``(a, b, c)`` with ``a != 0`` is compared with integer
directions through the groups spanned by ``(a, b, c)``, ``(0, 1, I)`` and
``(0, 1, -I)``.  In the chart ``a = 1`` with ``beta = b/a``, ``gamma = c/a``
the discrepancy between two such groups is ``min(D, S)`` where

    D = max(|beta - beta'|, |gamma - gamma'|, |beta^2 + gamma^2 - beta'^2 - gamma'^2| / 2)
    S = max(1, |beta + beta'|, |gamma + gamma'|, (beta^2 + gamma^2 + beta'^2 + gamma'^2) / 2)

The candidate scan works on floats and keeps everything within a small
margin of the running bound; the survivors are then compared exactly.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from . import kernels
from .approx2d import UndecidedTie
from .mcrs import (DiscrepancyValue, charpoly, form_discrepancy, group_from_matrix,
                   md_form_simul3)
from .numeric import (PrecisionExhausted, compare, format_real, integer_primitive,
                      is_rational, rdiv, sign, simplify)

REL_MARGIN = 1e-9


class NonCommutingGenerators(ValueError):
    def __init__(self):
        super().__init__("non-commuting generators")


class VerticalCandidate(ValueError):
    def __init__(self, vector):
        super().__init__(f"candidate {tuple(vector)} has first coordinate 0")


# ---------------------------------------------------------------------------
# integer matrices

Matrix = tuple[tuple[int, ...], ...]


def as_matrix(M) -> Matrix:
    M = tuple(tuple(int(x) for x in row) for row in M)
    if len(M) != 3 or any(len(row) != 3 for row in M):
        raise ValueError("expected a 3x3 integer matrix")
    return M


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(3)) for j in range(3))
                 for i in range(3))


def mat_vec(A: Matrix, v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(A[i][k] * v[k] for k in range(3)) for i in range(3))


def identity() -> Matrix:
    return ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def mat_det(A: Matrix) -> int:
    return charpoly(A)[3] * -1


def mat_inverse(A: Matrix) -> Matrix:
    """Inverse of a unimodular integer matrix."""
    det = mat_det(A)
    if det not in (1, -1):
        raise ValueError("matrix is not invertible over the integers")
    cof = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            c = [k for k in range(3) if k != j]
            minor = A[r[0]][c[0]] * A[r[1]][c[1]] - A[r[0]][c[1]] * A[r[1]][c[0]]
            cof[i][j] = minor if (i + j) % 2 == 0 else -minor
    return tuple(tuple(cof[j][i] * det for j in range(3)) for i in range(3))


def mat_pow(A: Matrix, k: int) -> Matrix:
    if k < 0:
        A, k = mat_inverse(A), -k
    out = identity()
    while k:
        if k & 1:
            out = mat_mul(out, A)
        A = mat_mul(A, A)
        k >>= 1
    return out


# ---------------------------------------------------------------------------
# targets and candidates

@dataclass(frozen=True)
class SimulTarget:
    """Direction ``(a, b, c)`` with ``a != 0``; components may be integers,
    fractions, surds or balls."""

    direction: tuple
    charpoly: tuple | None = None
    source: Matrix | None = None

    def __post_init__(self):
        if len(self.direction) != 3:
            raise ValueError("direction must have three components")
        if sign(self.direction[0]) == 0:
            raise ValueError("first coordinate of the target must be nonzero")

    @classmethod
    def from_operator(cls, M) -> "SimulTarget":
        """Eigendirection of the real eigenvalue of largest modulus."""
        M = as_matrix(M)
        G = group_from_matrix(M)
        best = None
        for lam, line in zip(G.eigenvalues, G.lines):
            if not line.is_real:
                continue
            mag = abs(float(lam.re if hasattr(lam, "re") else lam))
            if best is None or mag > best[0]:
                best = (mag, line)
        if best is None:
            raise ValueError("operator has no real eigenvalue")
        comps = tuple(simplify(c.re) for c in best[1].direction)
        return cls(comps, G.charpoly, M)

    @cached_property
    def beta(self):
        return simplify(rdiv(self.direction[1], self.direction[0]))

    @cached_property
    def gamma(self):
        return simplify(rdiv(self.direction[2], self.direction[0]))

    @cached_property
    def form(self):
        return md_form_simul3(1, self.beta, self.gamma)

    def floats(self) -> tuple[float, float]:
        return float(self.beta), float(self.gamma)

    @property
    def is_rational(self) -> bool:
        return is_rational(self.beta) and is_rational(self.gamma)

    def to_json(self) -> dict:
        out = {"chart": ["1", format_real(self.beta), format_real(self.gamma)]}
        if self.source is not None:
            out["operator"] = [list(r) for r in self.source]
        if self.charpoly is not None:
            out["charpoly"] = list(self.charpoly)
        return out


@dataclass(frozen=True, order=True)
class SimulCandidate:
    """Primitive integer direction with positive first coordinate."""

    vector: tuple[int, int, int]

    @classmethod
    def of(cls, v: Sequence[int]) -> "SimulCandidate":
        v = tuple(int(x) for x in v)
        if len(v) != 3:
            raise ValueError("candidate must have three coordinates")
        if v[0] == 0:
            raise VerticalCandidate(v)
        v = integer_primitive(v)
        if v[0] < 0:
            v = tuple(-x for x in v)
        return cls(v)

    @property
    def size(self) -> int:
        return max(abs(x) for x in self.vector)

    def sort_key(self):
        return (self.size, self.vector)

    def __str__(self):
        return "(%d,%d,%d)" % self.vector


def _candidate(c) -> SimulCandidate:
    return c if isinstance(c, SimulCandidate) else SimulCandidate.of(c)


def chart_branches(beta, gamma, beta2, gamma2):
    """The difference and sum expressions ``(D, S)`` in the a = 1 chart."""
    q1 = beta * beta + gamma * gamma
    q2 = beta2 * beta2 + gamma2 * gamma2
    d = _max(abs(beta - beta2), abs(gamma - gamma2), abs(q1 - q2) / 2)
    s = _max(1, abs(beta + beta2), abs(gamma + gamma2), (q1 + q2) / 2)
    return simplify(d), simplify(s)


def _max(*xs):
    best = xs[0]
    for x in xs[1:]:
        if compare(x, best) > 0:
            best = x
    return best


def discrepancy3(t: SimulTarget, c) -> DiscrepancyValue:
    """Discrepancy between the target group and the group of a candidate,
    computed from the full coefficient lists of both forms."""
    v = c.vector if isinstance(c, SimulCandidate) else tuple(int(x) for x in c)
    if v[0] == 0:
        raise VerticalCandidate(v)
    return form_discrepancy(t.form, md_form_simul3(*v))


def _float_rho(beta: float, gamma: float, v) -> float:
    a, b, c = v
    bb, cc = b / a, c / a
    d = max(abs(beta - bb), abs(gamma - cc),
            abs((beta - bb) * (beta + bb) + (gamma - cc) * (gamma + cc)) * 0.5)
    s = max(1.0, abs(beta + bb), abs(gamma + cc), (beta * beta + gamma * gamma + bb * bb + cc * cc) * 0.5)
    return min(d, s)


def _abs_margin(beta: float, gamma: float) -> float:
    return 1e-13 * (1.0 + beta * beta + gamma * gamma)


def _exact_values(t: SimulTarget, cands: Iterable[SimulCandidate]) -> dict:
    return {c: discrepancy3(t, c) for c in sorted(set(cands), key=SimulCandidate.sort_key)}


def _cmp(r1: DiscrepancyValue, r2: DiscrepancyValue, c1, c2) -> int:
    try:
        return r1.cmp(r2)
    except PrecisionExhausted:
        raise UndecidedTie(str(c1), str(c2)) from None


def _minimizers(values: dict):
    best, ties = None, []
    for cand, rho in values.items():
        if best is None:
            best, ties = rho, [cand]
            continue
        k = _cmp(rho, best, cand, ties[0])
        if k < 0:
            best, ties = rho, [cand]
        elif k == 0:
            ties.append(cand)
    return best, sorted(ties, key=SimulCandidate.sort_key)


def _survivors(rows) -> list[SimulCandidate]:
    return sorted({SimulCandidate(tuple(int(x) for x in r)) for r in rows},
                  key=SimulCandidate.sort_key)


# ---------------------------------------------------------------------------
# search

@dataclass
class SimulResult:
    target: SimulTarget
    N: int
    candidates: list[SimulCandidate]
    rho: DiscrepancyValue
    certificates: dict = field(default_factory=dict)

    def vectors(self) -> list[tuple[int, int, int]]:
        return [c.vector for c in self.candidates]

    def to_json(self) -> dict:
        return {"N": self.N, "target": self.target.to_json(), "rho": self.rho.to_json(),
                "minimizers": [str(c) for c in self.candidates],
                "certificates": self.certificates}


def _seed_bound(beta: float, gamma: float, N: int) -> float:
    """Float discrepancy of (1, round beta, round gamma) pulled into the box."""
    clamp = lambda x: max(-N, min(N, round(x)))
    return _float_rho(beta, gamma, (1, clamp(beta), clamp(gamma)))


def best_simul(t: SimulTarget, N: int, threads: int = 1, backend: str | None = None) -> SimulResult:
    """All primitive integer directions of size at most N that minimise the
    discrepancy to the target."""
    if N < 1:
        raise ValueError("N must be >= 1")
    beta, gamma = t.floats()
    absm = _abs_margin(beta, gamma)
    rows, _, bound = kernels.simul_scan(beta, gamma, range(1, N + 1), 0, _seed_bound(beta, gamma, N),
                                        rel=REL_MARGIN, absm=absm, threads=threads, backend=backend)
    values = _exact_values(t, _survivors(rows))
    rho, ties = _minimizers(values)
    cert = {"method": "shell-scan", "margin": {"rel": REL_MARGIN, "abs": absm},
            "float_bound": f"{bound:.12e}"}
    return SimulResult(t, N, ties, rho, cert)


@dataclass
class RecordRow:
    """A size at which the best discrepancy strictly improves."""

    size: int
    candidates: list[SimulCandidate]
    rho: DiscrepancyValue
    ties: list[SimulCandidate] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"size": self.size, "candidates": [str(c) for c in self.candidates],
               "rho": self.rho.to_json()}
        if self.ties:
            out["later_ties"] = [str(c) for c in self.ties]
        return out


def best_simul_records(t: SimulTarget, N: int, threads: int = 1,
                       backend: str | None = None) -> list[RecordRow]:
    """The sequence of best approximations for all bounds up to N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    beta, gamma = t.floats()
    absm = _abs_margin(beta, gamma)
    rows, _, _ = kernels.simul_scan(beta, gamma, range(1, N + 1), 1, math.inf,
                                    rel=REL_MARGIN, absm=absm, threads=threads, backend=backend)
    values = _exact_values(t, _survivors(rows))
    by_size: dict[int, dict] = {}
    for cand, rho in values.items():
        by_size.setdefault(cand.size, {})[cand] = rho
    records: list[RecordRow] = []
    for s in sorted(by_size):
        rho, ties = _minimizers(by_size[s])
        if not records:
            records.append(RecordRow(s, ties, rho))
            continue
        last = records[-1]
        k = _cmp(rho, last.rho, ties[0], last.candidates[0])
        if k < 0:
            records.append(RecordRow(s, ties, rho))
        elif k == 0:
            last.ties.extend(ties)
    return records


def best_at(records: Sequence[RecordRow], N: int) -> RecordRow:
    """Row in force at bound N."""
    row = None
    for r in records:
        if r.size > N:
            break
        row = r
    if row is None:
        raise ValueError("no record at or below this bound")
    return row


@dataclass
class RateReport:
    exponent: float
    points: list[tuple[int, float, float]]

    @property
    def window(self) -> tuple[float, float]:
        scaled = [p[2] for p in self.points]
        return min(scaled), max(scaled)

    def to_json(self) -> dict:
        lo, hi = self.window
        return {"exponent": self.exponent, "window": [lo, hi],
                "points": [{"N": n, "rho": f"{r:.12e}", "scaled": f"{s:.12e}"} for n, r, s in self.points]}


def rate_probe(records: Sequence[RecordRow], N_list: Sequence[int], exponent: float = 1.5) -> RateReport:
    pts = []
    for N in N_list:
        r = float(best_at(records, N).rho)
        pts.append((int(N), r, r * float(N) ** exponent))
    return RateReport(exponent, pts)


# ---------------------------------------------------------------------------
# orbits

@dataclass(frozen=True)
class OrbitFamily:
    """Vectors ``g_1^{e_1} ... g_k^{e_k} seed`` for exponents in the given
    inclusive ranges."""

    generators: tuple[Matrix, ...]
    seed: tuple[int, int, int]
    ranges: tuple[tuple[int, int], ...]
    names: tuple[str, ...] = ()
    source: Matrix | None = None

    def __post_init__(self):
        gens = tuple(as_matrix(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "seed", tuple(int(x) for x in self.seed))
        object.__setattr__(self, "ranges", tuple((int(lo), int(hi)) for lo, hi in self.ranges))
        if len(self.ranges) != len(gens):
            raise ValueError("one exponent range per generator")
        if any(lo > hi for lo, hi in self.ranges):
            raise ValueError("empty exponent range")
        others = list(gens)
        if self.source is not None:
            object.__setattr__(self, "source", as_matrix(self.source))
            others.append(self.source)
        for i, g in enumerate(gens):
            for h in others[i + 1:]:
                if mat_mul(g, h) != mat_mul(h, g):
                    raise NonCommutingGenerators()
        if not self.names:
            object.__setattr__(self, "names", tuple(f"e{i + 1}" for i in range(len(gens))))

    def vector(self, exponents: Sequence[int]) -> tuple[int, int, int]:
        if len(exponents) != len(self.generators):
            raise ValueError("one exponent per generator")
        v = self.seed
        for g, e in zip(reversed(self.generators), reversed(tuple(exponents))):
            v = mat_vec(mat_pow(g, int(e)), v)
        return v

    def exponent_tuples(self):
        def rec(i):
            if i == len(self.ranges):
                yield ()
                return
            lo, hi = self.ranges[i]
            for e in range(lo, hi + 1):
                for rest in rec(i + 1):
                    yield (e,) + rest
        return rec(0)

    def labelled(self, N: int) -> dict[SimulCandidate, tuple[int, ...]]:
        """Candidate -> first exponent tuple producing it, for sizes <= N."""
        out: dict[SimulCandidate, tuple[int, ...]] = {}
        for exps in self.exponent_tuples():
            v = self.vector(exps)
            if v[0] == 0 or max(abs(x) for x in v) == 0:
                continue
            c = SimulCandidate.of(v)
            if c.size <= N and c not in out:
                out[c] = exps
        return out


def orbit_candidates(f: OrbitFamily, N: int) -> list[SimulCandidate]:
    return sorted(f.labelled(N), key=SimulCandidate.sort_key)


# ---------------------------------------------------------------------------
# table verification

@dataclass(frozen=True)
class Claim:
    label: str
    vector: tuple[int, int, int]
    exponents: tuple[int, ...] | None = None


def claims_from_family(f: OrbitFamily, exponent_rows: Iterable[tuple[str, Sequence[int]]]) -> list[Claim]:
    return [Claim(label, f.vector(exps), tuple(int(e) for e in exps)) for label, exps in exponent_rows]


@dataclass
class RowVerdict:
    label: str
    candidate: SimulCandidate
    rho: DiscrepancyValue | None
    verdict: str
    counterexample: SimulCandidate | None = None
    exponents: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        out = {"label": self.label, "vector": str(self.candidate), "size": self.candidate.size,
               "verdict": self.verdict}
        if self.exponents is not None:
            out["exponents"] = list(self.exponents)
        if self.rho is not None:
            out["rho"] = self.rho.to_json()
        if self.counterexample is not None:
            out["counterexample"] = str(self.counterexample)
        return out


@dataclass
class TableReport:
    N: int
    rows: list[RowVerdict]
    missing: list[dict]
    beyond_bound: list[str]
    notes: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        kinds = {r.verdict.split(":")[0] for r in self.rows}
        if "refuted" in kinds or self.missing:
            return "refuted"
        if "undecided-at-precision" in kinds:
            return "undecided-at-precision"
        return "confirmed"

    def to_json(self) -> dict:
        return {"N": self.N, "verdict": self.verdict, "rows": [r.to_json() for r in self.rows],
                "missing": self.missing, "beyond_bound": self.beyond_bound, "notes": self.notes}


def verify_table(t: SimulTarget, f: OrbitFamily | None, N: int, claimed: Sequence[Claim],
                 threads: int = 1, backend: str | None = None) -> TableReport:
    """Check a claimed list of best approximations up to size N.

    A row is refuted when some direction of no larger size is strictly
    closer to the target.  A direction that is not claimed and is at least
    as close as the last claimed row of no larger size is reported missing.
    """
    rows: list[RowVerdict] = []
    beyond: list[str] = []
    notes: list[str] = []
    entries = []
    for cl in claimed:
        if f is not None and cl.exponents is not None and f.vector(cl.exponents) != tuple(cl.vector):
            raise ValueError(f"claim {cl.label} does not match its exponents")
        cand = SimulCandidate.of(cl.vector)
        if cand.size > N:
            beyond.append(cl.label)
            continue
        entries.append((cand, cl))
    entries.sort(key=lambda e: e[0].sort_key())
    if not entries:
        return TableReport(N, [], [], beyond, ["no claimed rows within the bound"])
    claimed_set = {c for c, _ in entries}
    rhos = {c: discrepancy3(t, c) for c in claimed_set}

    beta, gamma = t.floats()
    absm = _abs_margin(beta, gamma)
    sizes = [c.size for c, _ in entries]
    vals = [float(rhos[c]) for c, _ in entries]
    # the scan threshold must never increase with the size
    for i in range(1, len(vals)):
        vals[i] = min(vals[i], vals[i - 1])
    if sizes[0] > 1:
        notes.append(f"sizes below {sizes[0]} are only checked against the first row")
    found, _, _ = kernels.simul_scan(beta, gamma, range(1, N + 1), 2, math.inf, sizes, vals,
                                     rel=REL_MARGIN, absm=absm, threads=threads, backend=backend)
    others = _exact_values(t, [c for c in _survivors(found) if c not in claimed_set])
    pool = sorted({**others, **{c: rhos[c] for c in claimed_set}}.items(),
                  key=lambda kv: kv[0].sort_key())

    for cand, cl in entries:
        rho = rhos[cand]
        verdict, witness = "confirmed", None
        for other, r in pool:
            if other.size > cand.size:
                break
            if other == cand:
                continue
            try:
                if r.cmp(rho) < 0:
                    verdict, witness = "refuted", other
                    break
            except PrecisionExhausted:
                verdict, witness = "undecided-at-precision", other
        rows.append(RowVerdict(cl.label, cand, rho, verdict, witness, cl.exponents))

    missing = []
    for other, r in pool:
        if other in claimed_set:
            continue
        prior = [(c, cl) for c, cl in entries if c.size <= other.size]
        ref_c, ref_cl = prior[-1] if prior else entries[0]
        try:
            k = r.cmp(rhos[ref_c])
        except PrecisionExhausted:
            missing.append({"vector": str(other), "size": other.size, "rho": r.to_json(),
                            "after": ref_cl.label, "kind": "undecided-at-precision"})
            continue
        if k < 0 or (k == 0 and prior):
            missing.append({"vector": str(other), "size": other.size, "rho": r.to_json(),
                            "after": ref_cl.label if prior else None,
                            "kind": "improvement" if k < 0 else "tie"})
    return TableReport(N, rows, missing, beyond, notes)


# ---------------------------------------------------------------------------
# output

def records_csv(records: Sequence[RecordRow], f: OrbitFamily | None = None, N: int | None = None) -> str:
    """One line per record: index, orbit exponents (blank when the vector is
    not in the orbit), vector, size and discrepancy."""
    labels = {}
    if f is not None:
        bound = N if N is not None else max((r.size for r in records), default=1)
        labels = f.labelled(bound)
    names = list(f.names) if f is not None else []
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", *names, "a", "b", "c", "size", "rho"])
    for i, row in enumerate(records, 1):
        for cand in row.candidates:
            exps = labels.get(cand)
            cols = [str(e) for e in exps] if exps is not None else [""] * len(names)
            w.writerow([i, *cols, *cand.vector, cand.size, f"{float(row.rho):.12e}"])
    return buf.getvalue()


def report_csv(report: TableReport, names: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", *names, "a", "b", "c", "size", "rho", "verdict"])
    for row in report.rows:
        exps = [str(e) for e in row.exponents] if row.exponents is not None else [""] * len(names)
        rho = f"{float(row.rho):.12e}" if row.rho is not None else ""
        w.writerow([row.label, *exps, *row.candidate.vector, row.candidate.size, rho, row.verdict])
    return buf.getvalue()


__all__ = [
    "Claim", "NonCommutingGenerators", "OrbitFamily", "RateReport", "RecordRow", "RowVerdict",
    "SimulCandidate", "SimulResult", "SimulTarget", "TableReport", "VerticalCandidate",
    "best_at", "best_simul", "best_simul_records", "chart_branches", "claims_from_family",
    "discrepancy3", "mat_inverse", "mat_mul", "mat_pow", "mat_vec", "orbit_candidates",
    "rate_probe", "records_csv", "report_csv", "verify_table",
]

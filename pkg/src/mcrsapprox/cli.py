"""Command line interface.

    mcrs cf expand "(1+sqrt 5)/2" --max-terms 5
    mcrs cf best-in-box "(1+sqrt 5)/2" --N 100
    mcrs approx 2d --lines "(1,2) (2,3)" --N 1
    mcrs approx 3d --operator B --N 10000 --records
    mcrs verify-paper --only antisail
    mcrs sail --cone "(1,2) (2,3)" --k 1 --box 100 --format csv

Exit codes: 0 ok, 1 regression refuted, 2 parse error, 3 invalid input,
4 precision exhausted.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys

from . import approx2d, approx3d, regression, sails2d
from .cf import best_dioph_in_box, cf_expand
from .config import FORMATS, RunConfig
from .mcrs import MCRSGroup, NotRegular, group_from_matrix
from .numeric import PrecisionExhausted, format_real
from .operators import ParseError, parse_matrix, parse_value, parse_vectors
from .serialize import dumps, envelope

EXIT_OK, EXIT_REFUTED, EXIT_PARSE, EXIT_DOMAIN, EXIT_PRECISION = 0, 1, 2, 3, 4


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ParseError(" ".join(sys.argv[1:]), message)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--precision-bits", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--oracle-cap", type=int, default=None)
    p.add_argument("--format", choices=FORMATS, default=None, dest="output_format")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _ArgumentParser(prog="mcrs", description="Rational approximation of MCRS-groups.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    cf = sub.add_parser("cf", help="continued fractions")
    cf_sub = cf.add_subparsers(dest="cf_command", required=True, parser_class=_ArgumentParser)
    p = cf_sub.add_parser("expand", parents=[common])
    p.add_argument("value")
    p.add_argument("--max-terms", type=int, default=20)
    p = cf_sub.add_parser("best-in-box", parents=[common])
    p.add_argument("value")
    p.add_argument("--N", type=int, required=True)

    ap = sub.add_parser("approx", help="best approximations")
    ap_sub = ap.add_subparsers(dest="dim", required=True, parser_class=_ArgumentParser)
    p = ap_sub.add_parser("2d", parents=[common])
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix")
    src.add_argument("--lines")
    src.add_argument("--alpha1")
    src.add_argument("--complex", nargs=2, metavar=("ALPHA", "BETA"))
    p.add_argument("--alpha2")
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--sweep", help="comma separated bounds; emits N, rho_N, rho_N N^2, sail level")
    p = ap_sub.add_parser("3d", parents=[common])
    p.add_argument("--operator", required=True)
    p.add_argument("--N", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--records", action="store_true", help="all best approximations up to N")
    mode.add_argument("--verify", action="store_true",
                      help="check the built-in orbit table of the operator up to N")

    p = sub.add_parser("verify-paper", parents=[common])
    p.add_argument("--only")
    p.add_argument("--N", type=int, default=None)

    p = sub.add_parser("sail", parents=[common])
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--cone")
    src.add_argument("--matrix")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--box", type=int, default=100)
    return parser


# ---------------------------------------------------------------------------

def _emit(cfg: RunConfig, kind: str, payload: dict, text: str, table: str | None = None) -> None:
    if cfg.output_format == "json":
        sys.stdout.write(dumps(envelope(kind, payload, cfg.precision_bits)))
    elif cfg.output_format == "csv":
        sys.stdout.write(table if table is not None else text)
    else:
        sys.stdout.write(text)


def _csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerows(rows)
    return buf.getvalue()


def cmd_cf(args, cfg: RunConfig) -> int:
    x = parse_value(args.value)
    if args.cf_command == "expand":
        c = cf_expand(x, args.max_terms)
        terms = " ".join(map(str, c.terms))
        payload = {"value": args.value, "kind": c.kind, "terms": list(c.terms),
                   "preperiod": list(c.preperiod), "period": list(c.period),
                   "convergents": [str(k) for k in c.convergents()]}
        table = _csv([["index", "term", "convergent"]] +
                     [[i, t, str(k)] for i, (t, k) in enumerate(zip(c.terms, c.convergents()))])
        _emit(cfg, "cf-expand", payload, terms + "\n", table)
        return EXIT_OK
    best, nxt = best_dioph_in_box(x, args.N)
    payload = {"value": args.value, "N": args.N, "best": str(best),
               "next": None if nxt is None else str(nxt)}
    _emit(cfg, "cf-best-in-box", payload, f"{best}\n",
          _csv([["N", "best", "next"], [args.N, str(best), "" if nxt is None else str(nxt)]]))
    return EXIT_OK


def _group_2d(args) -> MCRSGroup:
    if args.matrix:
        M = parse_matrix(args.matrix)
        if len(M) != 2:
            raise ValueError("a 2x2 matrix is required")
        if M[0][0] * M[1][1] - M[0][1] * M[1][0] == 0:
            raise NotRegular("singular matrix")
        return group_from_matrix(M)
    if args.lines:
        vecs = parse_vectors(args.lines)
        if len(vecs) != 2 or any(len(v) != 2 for v in vecs):
            raise ValueError("two plane vectors are required")
        return MCRSGroup.from_vectors(vecs)
    if args.complex:
        return MCRSGroup.complex_pair(parse_value(args.complex[0]), parse_value(args.complex[1]))
    if args.alpha2 is None:
        raise ParseError("--alpha1", "needs --alpha2")
    return MCRSGroup.from_slopes(parse_value(args.alpha1), parse_value(args.alpha2))


def _pair_text(key) -> str:
    return "  ".join(str(approx2d.GaussianVector(line)) for line in key)


def _sweep_rows(G: MCRSGroup, bounds, cfg: RunConfig):
    rows = [["N", "rho", "rho_N2", "sail_level"]]
    payload = []
    for N in bounds:
        res = approx2d.best_approx(approx2d.ApproxQuery(G, N), cfg.oracle_cap, cfg.threads)
        rho = float(res.rho.value)
        try:
            levels = approx2d.sail_level_of_result(G, res)
            level = min(max(e["levels"]) for e in levels)
        except (ValueError, ArithmeticError):
            level = ""
        rows.append([N, f"{rho:.12e}", f"{rho * N * N:.12e}", level])
        payload.append({"N": N, "rho": res.rho.to_json(), "scaled": rho * N * N, "sail_level": level})
    return rows, payload


def cmd_approx(args, cfg: RunConfig) -> int:
    if args.dim == "2d":
        G = _group_2d(args)
        if args.sweep:
            bounds = [int(x) for x in args.sweep.split(",") if x.strip()]
            rows, payload = _sweep_rows(G, bounds, cfg)
            text = "\n".join("  ".join(str(c) for c in r) for r in rows) + "\n"
            _emit(cfg, "approx-2d-sweep", {"target": G.to_json(), "sweep": payload}, text, _csv(rows))
            return EXIT_OK
        if args.N is None:
            raise ParseError("approx 2d", "--N or --sweep is required")
        res = approx2d.best_approx(approx2d.ApproxQuery(G, args.N), cfg.oracle_cap, cfg.threads)
        lines = [f"N = {args.N}", f"rho = {format_real(res.rho.value)}",
                 f"minimizers ({len(res.keys)}):"] + ["  " + _pair_text(k) for k in res.keys]
        lines.append(f"method = {res.certificates.get('method')}")
        table = _csv([["line1", "line2", "rho"]] +
                     [[str(approx2d.GaussianVector(k[0])), str(approx2d.GaussianVector(k[1])),
                       format_real(res.rho.value)] for k in res.keys])
        _emit(cfg, "approx-2d", res.to_json(), "\n".join(lines) + "\n", table)
        return EXIT_OK

    M = parse_matrix(args.operator)
    if len(M) != 3:
        raise ValueError("a 3x3 operator is required")
    t = approx3d.SimulTarget.from_operator(M)
    family = _family_for(args.operator, M)
    if args.verify:
        return _verify_table(args, cfg, t, family)
    if args.records:
        records = approx3d.best_simul_records(t, args.N, cfg.threads)
        table = approx3d.records_csv(records, family, args.N)
        payload = {"N": args.N, "target": t.to_json(), "records": [r.to_json() for r in records]}
        text = "\n".join(f"{r.size:>8}  {' '.join(map(str, r.candidates))}  rho = {float(r.rho):.6e}"
                         for r in records) + "\n"
        _emit(cfg, "approx-3d-records", payload, text, table)
        return EXIT_OK
    res = approx3d.best_simul(t, args.N, cfg.threads)
    text = (f"N = {args.N}\nrho = {format_real(res.rho.value)}\n"
            + "".join(f"  {c}\n" for c in res.candidates))
    table = _csv([["a", "b", "c", "size", "rho"]] +
                 [[*c.vector, c.size, f"{float(res.rho):.12e}"] for c in res.candidates])
    _emit(cfg, "approx-3d", res.to_json(), text, table)
    return EXIT_OK


def _family_for(name: str, M):
    key = name.strip()
    if key == "B":
        return regression.b_family()
    if key in ("E1", "golden2d"):
        return regression.golden_family()
    return None


def _verify_table(args, cfg: RunConfig, t, family) -> int:
    if family is None:
        raise ValueError("no built-in table for this operator (use B, E1 or golden2d)")
    claims = regression.b_claims(family) if args.operator.strip() == "B" \
        else regression.golden_claims(family)
    report = approx3d.verify_table(t, family, args.N, claims, cfg.threads)
    lines = [f"{r.label:>4}  {r.candidate}  {r.verdict}" for r in report.rows]
    lines += [f"missing: {m}" for m in report.missing]
    lines.append(f"verdict: {report.verdict}")
    _emit(cfg, "approx-3d-verify", report.to_json(), "\n".join(lines) + "\n",
          approx3d.report_csv(report, family.names))
    if report.verdict == "refuted":
        return EXIT_REFUTED
    return EXIT_PRECISION if report.verdict != "confirmed" else EXIT_OK


def cmd_verify_paper(args, cfg: RunConfig) -> int:
    try:
        checks = regression.run_checks(args.only, args.N, cfg.threads)
    except KeyError:
        raise ParseError(args.only, "unknown check; known: " + ", ".join(regression.check_ids()))
    lines = [f"{c.id}: paper {c.paper} | computed {c.computed} | {c.verdict}" for c in checks]
    bad = [c for c in checks if not c.ok]
    lines.append(f"{len(checks) - len(bad)}/{len(checks)} checks passed")
    table = _csv([["id", "paper", "computed", "verdict"]] +
                 [[c.id, c.paper, c.computed, c.verdict] for c in checks])
    payload = {"checks": [c.to_json() for c in checks], "passed": not bad}
    _emit(cfg, "verify-paper", payload, "\n".join(lines) + "\n", table)
    if any(c.verdict == regression.UNDECIDED for c in bad) and \
            all(c.verdict == regression.UNDECIDED for c in bad):
        return EXIT_PRECISION
    return EXIT_REFUTED if bad else EXIT_OK


def cmd_sail(args, cfg: RunConfig) -> int:
    if args.cone:
        vecs = parse_vectors(args.cone)
        if len(vecs) != 2 or any(len(v) != 2 for v in vecs):
            raise ValueError("a cone needs two plane vectors")
        polys = [sails2d.k_sail(sails2d.Cone2.of(*vecs), args.k, args.box)]
    else:
        M = parse_matrix(args.matrix)
        if len(M) != 2:
            raise ValueError("a 2x2 matrix is required")
        polys = sails2d.geometric_cf(group_from_matrix(M), args.k, args.box)
    payload = {"k": args.k, "box": args.box, "polylines": [p.to_json() for p in polys]}
    rows = [["polyline", "index", "x", "y", "certified"]]
    text = []
    for i, p in enumerate(polys):
        for j, (v, ok) in enumerate(zip(p.vertices, p.certified)):
            rows.append([i, j, v[0], v[1], int(ok)])
        line = " ".join("(%d,%d)" % tuple(v) for v in p.vertices)
        text.append(line)
        if p.period is not None:
            text.append("  period: " + " ".join("(%d,%d)" % tuple(v) for v in p.period)
                        + "  shift: " + str([list(r) for r in p.periodic_shift]))
    _emit(cfg, "sail", payload, "\n".join(text) + "\n", _csv(rows))
    return EXIT_OK


COMMANDS = {"cf": cmd_cf, "approx": cmd_approx, "verify-paper": cmd_verify_paper, "sail": cmd_sail}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = RunConfig.from_env(precision_bits=args.precision_bits, threads=args.threads,
                                 oracle_cap=args.oracle_cap, output_format=args.output_format)
        cfg.apply()
        return COMMANDS[args.command](args, cfg)
    except ParseError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_PARSE
    except PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (NotRegular, sails2d.DegenerateCone, approx2d.OracleCapExceeded, ValueError,
            ZeroDivisionError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())

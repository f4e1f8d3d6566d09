"""Command-line front end: ``ncycle <subcommand> ...``.

Data goes to stdout, diagnostics to stderr.  Exit codes: 0 pass/member,
2 usage error, 3 contextual, 4 invalid model, 5 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import fine, polytope, quantum
from .model import ModelError, is_valid, load_model, model_to_json, scalar_to_json
from .sampling import mixed_models, random_contextual, random_member

SCHEMA = "ncycle/1"

EXIT_OK, EXIT_USAGE, EXIT_CONTEXTUAL, EXIT_INVALID, EXIT_FAILED = 0, 2, 3, 4, 5

VERIFY_CHECKS = ("facets", "elimination", "oracle", "bound", "fine-sweep")


class UsageError(Exception):
    pass


def fmt(x):
    """JSON-ready scalar: exact as "num/den", floats at 12 significant digits."""
    if isinstance(x, Fraction):
        return scalar_to_json(x)
    if isinstance(x, float):
        return float(f"{x:.12g}")
    return x


def fmt_text(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


@dataclass
class RunReport:
    command: str
    n: int | None
    status: str = "info"
    payload: dict = field(default_factory=dict)
    failed_checks: list = field(default_factory=list)
    timing: float | None = None

    def finish(self, passed: bool | None = None) -> "RunReport":
        if passed is None:
            passed = not self.failed_checks
        self.status = "pass" if passed and not self.failed_checks else "fail"
        return self

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "n": self.n,
            "status": self.status,
            "timing": None if self.timing is None else round(self.timing, 3),
            "payload": self.payload,
            "failed_checks": self.failed_checks,
        }


def _emit_json(obj, out) -> None:
    out.write(json.dumps(obj, indent=2) + "\n")


def _check_n(n: int) -> None:
    if n is None or n < 3:
        raise UsageError(f"unsupported n={n}: the n-cycle scenario needs n >= 3")


# --- inequalities / vertices -----------------------------------------------

def cmd_inequalities(args, out) -> int:
    _check_n(args.n)
    ineqs = polytope.inequalities(args.n)
    fmt_ = args.format or "csv"
    if fmt_ == "json":
        _emit_json({"schema": SCHEMA, "n": args.n,
                    "inequalities": [{"gamma": list(q.gamma), "bound": q.bound}
                                     for q in ineqs]}, out)
    elif fmt_ == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"gamma_{i}" for i in range(args.n)] + ["bound"])
        for q in ineqs:
            w.writerow(list(q.gamma) + [q.bound])
        out.write(buf.getvalue())
    else:
        for q in ineqs:
            out.write(str(q) + "\n")
    return EXIT_OK


def _vertex_entries(n: int, family: str) -> list:
    entries = []
    if family in ("nc", "all"):
        for v in polytope.noncontextual_vertices(n):
            entries.append({"family": "nc", **model_to_json(v.model)})
    if family in ("ctx", "all"):
        for c in polytope.contextual_vertices(n):
            entries.append({"family": "ctx", **model_to_json(c.model)})
    return entries


def cmd_vertices(args, out) -> int:
    _check_n(args.n)
    entries = _vertex_entries(args.n, args.family)
    fmt_ = args.format or "json"
    if fmt_ == "json":
        _emit_json({"schema": SCHEMA, "n": args.n, "family": args.family,
                    "vertices": entries}, out)
    elif fmt_ == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["family"] + [f"X{i}" for i in range(args.n)]
                   + [f"X{i}X{(i + 1) % args.n}" for i in range(args.n)])
        for e in entries:
            w.writerow([e["family"]] + [_int_str(v) for v in e["local"] + e["correlations"]])
        out.write(buf.getvalue())
    else:
        for e in entries:
            vals = " ".join(f"{_int_str(v):>2}" for v in e["local"] + e["correlations"])
            out.write(f"{e['family']:<4}{vals}\n")
    return EXIT_OK


def _int_str(s: str) -> str:
    return s[:-2] if s.endswith("/1") else s


# --- check / fine ----------------------------------------------------------

def _violation_json(v: polytope.Violation) -> dict:
    d = {"kind": v.facet.kind, "facet": str(v.facet), "margin": fmt(v.amount)}
    if v.facet.kind == "inequality":
        d["gamma"] = list(v.facet.inequality.gamma)
    else:
        d["edge"], d["outcome"] = v.facet.edge, v.facet.outcome
    return d


def cmd_check(args, out) -> int:
    try:
        mm = load_model(args.model)
    except (OSError, ModelError, ValueError) as exc:
        raise UsageError(f"cannot read model: {exc}") from exc
    report = RunReport("check", mm.n)
    facets = polytope.membership_by_facets(mm)
    validity = is_valid(mm)
    payload = {
        "no_disturbance": validity.valid,
        "noncontextual": facets.member,
        "saturated_positivity": len(validity.saturated),
        "violations": [_violation_json(v) for v in facets.violations],
        "max_inequality": list(facets.max_inequality.gamma),
        "max_value": fmt(facets.max_value),
        "margin": fmt(facets.margin),
    }
    if args.cross_check:
        lp = polytope.membership_by_lp(mm)
        payload["lp_member"] = lp.member
        if lp.member != facets.member:
            report.failed_checks.append("facet and LP membership disagree")
    if args.fine:
        if validity.valid:
            ext = fine.extend_global(mm)
            payload["global_extension"] = (ext.to_json() if ext.feasible
                                           else {"infeasible": True,
                                                 "certificate_verified": ext.verify()})
            if ext.feasible != facets.member:
                report.failed_checks.append("global extension disagrees with facets")
        else:
            payload["global_extension"] = None
    report.payload = payload
    report.finish()
    if report.failed_checks:
        code = EXIT_FAILED
    elif not validity.valid:
        code = EXIT_INVALID
    elif not facets.member:
        code = EXIT_CONTEXTUAL
    else:
        code = EXIT_OK
    if not args.quiet:
        if (args.format or "text") == "json":
            _emit_json(report.to_json(), out)
        else:
            verdict = {EXIT_OK: "noncontextual", EXIT_CONTEXTUAL: "contextual",
                       EXIT_INVALID: "outside the no-disturbance polytope",
                       EXIT_FAILED: "cross-check failure"}[code]
            out.write(f"n={mm.n}: {verdict}\n")
            for v in facets.violations:
                out.write(f"  violated: {v.facet}  margin {fmt_text(fmt(v.amount))}\n")
            for msg in report.failed_checks:
                out.write(f"  FAILED: {msg}\n")
    return code


def cmd_fine(args, out) -> int:
    try:
        mm = load_model(args.model)
    except (OSError, ModelError, ValueError) as exc:
        raise UsageError(f"cannot read model: {exc}") from exc
    if not is_valid(mm).valid:
        print("model is outside the no-disturbance polytope", file=sys.stderr)
        return EXIT_INVALID
    ext = fine.extend_global(mm)
    if ext.feasible:
        _emit_json(ext.to_json(), out)
        return EXIT_OK
    _emit_json({"n": mm.n, "infeasible": True,
                "farkas": [scalar_to_json(y) for y in ext.multipliers],
                "certificate_verified": ext.verify()}, out)
    return EXIT_CONTEXTUAL


# --- verify ----------------------------------------------------------------

def verify_facets(n: int) -> RunReport:
    rep = RunReport("verify:facets", n)
    ranks, sat_counts, confirmed = set(), set(), 0
    for q in polytope.inequalities(n):
        fr = polytope.verify_facet(q, n)
        ranks.add(fr.affine_rank)
        sat_counts.add(len(fr.saturating))
        if fr.is_facet and len(fr.saturating) == 2 * n:
            confirmed += 1
        else:
            rep.failed_checks.append(
                f"{q.gamma}: rank {fr.affine_rank}, {len(fr.saturating)} saturating, "
                f"max {fr.max_value}")
    rep.payload = {"inequalities": 2 ** (n - 1), "confirmed": confirmed,
                   "saturating_counts": sorted(sat_counts),
                   "affine_ranks": sorted(ranks)}
    return rep.finish()


def verify_elimination(n: int) -> RunReport:
    rep = RunReport("verify:elimination", n)
    confirmed = 0
    for c in polytope.contextual_vertices(n):
        er = polytope.verify_elimination(c, n)
        mem = polytope.membership_by_facets(c.model)
        viol = mem.violated_inequalities
        ok = (er.confirmed and len(viol) == 1 and viol[0].amount == 2
              and viol[0].facet.inequality.gamma == c.corr_signs)
        if ok:
            confirmed += 1
        else:
            rep.failed_checks.append(f"contextual vertex {c.corr_signs}")
    rep.payload = {"contextual_vertices": 2 ** (n - 1), "confirmed": confirmed,
                   "total_vertices": 2 ** n + 2 ** (n - 1)}
    return rep.finish()


def verify_oracle(n: int, force: bool = False) -> RunReport:
    rep = RunReport("verify:oracle", n)
    ok, found = polytope.oracle_agrees(n, force=force)
    nc = sum(1 for m in found if all(v != 0 for v in m.local))
    rep.payload = {"vertices_found": len(found), "noncontextual": nc,
                   "contextual": len(found) - nc,
                   "expected": 2 ** n + 2 ** (n - 1), "matches_families": ok}
    if not ok:
        rep.failed_checks.append("oracle vertex set differs from generated families")
    return rep.finish()


def verify_bound(n: int) -> RunReport:
    rep = RunReport("verify:bound", n)
    values = set()
    for q in polytope.inequalities(n):
        b = polytope.classical_bound_brute(q, n)
        values.add(b)
        if b != n - 2:
            rep.failed_checks.append(f"{q.gamma}: brute-force bound {b}")
    rep.payload = {"inequalities": 2 ** (n - 1), "bounds": sorted(values),
                   "expected": n - 2}
    return rep.finish()


def verify_fine_sweep(n: int, seed: int, samples: int) -> RunReport:
    rep = RunReport("verify:fine-sweep", n)
    models = polytope.all_vertex_models(n)
    rng_models = [m for m in mixed_models(n, samples, seed) if is_valid(m).valid]
    agree = 0
    for m in models + rng_models:
        if fine.fine_equivalence_check(m):
            agree += 1
        else:
            rep.failed_checks.append(f"model {[scalar_to_json(v) for v in m.vector]}")
    rep.payload = {"vertices": len(models), "random_models": len(rng_models),
                   "seed": seed, "agree": agree}
    return rep.finish()


def cmd_verify(args, out) -> int:
    _check_n(args.n)
    which = [w.strip() for w in args.which.split(",") if w.strip()]
    unknown = [w for w in which if w not in VERIFY_CHECKS]
    if unknown or not which:
        raise UsageError(f"unknown checks {unknown}; choose from {', '.join(VERIFY_CHECKS)}")
    if "oracle" in which and args.n > polytope.ORACLE_MAX_N and not args.force:
        raise UsageError(f"oracle is limited to n <= {polytope.ORACLE_MAX_N}; "
                         f"pass --force to override")
    if "fine-sweep" in which:
        if args.seed is None:
            raise UsageError("fine-sweep requires --seed")
        if args.n > fine.MAX_N and not args.force:
            raise UsageError(f"fine-sweep is limited to n <= {fine.MAX_N}")
    reports = []
    for w in which:
        t0 = time.perf_counter()
        if w == "facets":
            r = verify_facets(args.n)
        elif w == "elimination":
            r = verify_elimination(args.n)
        elif w == "oracle":
            r = verify_oracle(args.n, force=args.force)
        elif w == "bound":
            r = verify_bound(args.n)
        else:
            r = verify_fine_sweep(args.n, args.seed, args.samples)
        if args.timing:
            r.timing = time.perf_counter() - t0
        reports.append(r)
    top = RunReport("verify", args.n,
                    payload={"checks": [r.to_json() for r in reports]},
                    failed_checks=[f"{r.command}: {m}" for r in reports
                                   for m in r.failed_checks])
    top.finish()
    if not args.quiet:
        if (args.format or "text") == "json":
            _emit_json(top.to_json(), out)
        else:
            for r in reports:
                summary = ", ".join(f"{k}={v}" for k, v in r.payload.items())
                out.write(f"{r.command:<22} {r.status.upper():<5} {summary}\n")
                for m in r.failed_checks:
                    out.write(f"    {m}\n")
    return EXIT_OK if top.status == "pass" else EXIT_FAILED


# --- quantum ---------------------------------------------------------------

def cmd_quantum(args, out) -> int:
    _check_n(args.n)
    n = args.n
    qr = quantum.build(n)
    rep = RunReport("quantum", n)
    rep.failed_checks.extend(qr.check())
    mm = quantum.correlations_of(qr)
    ineq, value = quantum.omega_max(qr)
    bound_q = quantum.tsirelson(n)
    agrees = abs(value - bound_q) <= quantum.VALUE_TOL
    if not agrees:
        rep.failed_checks.append(f"omega {value} differs from {bound_q}")
    if ineq.gamma != quantum.expected_gamma(n):
        rep.failed_checks.append(f"maximum attained on {ineq.gamma}")
    violation = value > n - 2 + quantum.VALUE_TOL
    rep.payload = {
        "construction": "odd" if n % 2 else "even",
        "dim": qr.dim,
        "local": [fmt(v) for v in mm.local],
        "correlations": [fmt(v) for v in mm.correlations],
        "gamma": list(ineq.gamma),
        "omega": fmt(value),
        "tsirelson": fmt(bound_q),
        "lovasz_theta": fmt(quantum.lovasz_closed_form(quantum.graph_kind(n), n)),
        "classical_bound": n - 2,
        "margin": fmt(value - (n - 2)),
        "violation": violation,
        "agreement": agrees,
    }
    rep.finish()
    if args.export:
        with open(args.export, "w") as fh:
            json.dump(qr.to_json(), fh)
    if not args.quiet:
        if (args.format or "text") == "json":
            _emit_json(rep.to_json(), out)
        else:
            p = rep.payload
            out.write(f"n={n} ({p['construction']} construction, dim {p['dim']})\n")
            out.write("correlations: " + " ".join(fmt_text(v) for v in p["correlations"]) + "\n")
            out.write(f"omega      {fmt_text(p['omega'])}\n")
            out.write(f"tsirelson  {fmt_text(p['tsirelson'])}\n")
            out.write(f"classical  {n - 2}\n")
            label = "violation" if violation else "no violation"
            out.write(f"margin     {fmt_text(p['margin'])} ({label})\n")
            out.write(f"agreement  {'pass' if agrees else 'fail'} (tol 1e-9)\n")
    return EXIT_OK if rep.status == "pass" else EXIT_FAILED


# --- parser ----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"))
    common.add_argument("--quiet", action="store_true")

    p = _Parser(prog="ncycle", parents=[common],
                description="n-cycle noncontextual polytope toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("inequalities", parents=[common],
                       help="list the 2^(n-1) tight inequalities")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_inequalities)

    s = sub.add_parser("vertices", parents=[common],
                       help="list vertices of the no-disturbance polytope")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--family", choices=("nc", "ctx", "all"), default="all")
    s.set_defaults(func=cmd_vertices)

    s = sub.add_parser("check", parents=[common], help="classify a model file")
    s.add_argument("model")
    s.add_argument("--cross-check", action="store_true",
                   help="also decide membership by exact LP")
    s.add_argument("--fine", action="store_true",
                   help="also attempt a global joint distribution")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("verify", parents=[common], help="run verification suites")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--which", default="facets,elimination,oracle,bound")
    s.add_argument("--seed", type=int)
    s.add_argument("--samples", type=int, default=100)
    s.add_argument("--force", action="store_true")
    s.add_argument("--timing", action="store_true",
                   help="record wall-clock time per check (output no longer reproducible)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("quantum", parents=[common],
                       help="evaluate the maximally violating construction")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--export", metavar="FILE")
    s.set_defaults(func=cmd_quantum)

    s = sub.add_parser("fine", parents=[common],
                       help="extend a model to a global joint distribution")
    s.add_argument("model")
    s.set_defaults(func=cmd_fine)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        print(f"ncycle: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

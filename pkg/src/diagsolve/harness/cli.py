"""Command-line entry point: ``diagsolve <command> ...`` (also ``python -m diagsolve``).

Exit codes: 0 success, 2 domain error, 3 resource or budget error,
4 numerical-consistency error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from .. import __version__
from ..archimedean import singular_integral_quadrature, singular_integral_slab_mc
from ..arith import SeededStream
from ..counting import (
    CountMode,
    congruent_power_pairs,
    count_solutions,
    enumerate_solutions,
    smallest_solution,
    upsilon_count,
    xi_count,
)
from ..errors import DiagsolveError, DomainError
from ..forms import DiagonalForm, adversarial_ab, adversarial_pq
from ..local import local_prime_set, local_report, padic_soluble, series_lower_certificate
from ..singular import series_truncated
from . import experiments as ex
from .records import canonical_json, jsonable, run_store_append, run_store_read

EXPORT_HELP = """\
Columns: kind, seed, canonical_hash, timestamp, then every scalar leaf of
params and results as dotted paths (params.k, results.found.fraction, ...).
Lists and nested objects below scalar level are written as compact JSON.
The column set is the union over all records; cells missing for a kind are
empty.  Typical kind-specific columns:
  local_density    results.locally_soluble.{fraction,n,successes}, results.failures.real
  small_solutions  results.per_C (JSON list of per-C fractions), results.censored.count
  hasse            results.found.{fraction,n}, results.locally_soluble, results.unresolved
  variance         results.{lhs,ratio,sum_rho_squared}, results.range_hypothesis.holds
"""


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _emit(obj) -> None:
    print(json.dumps(jsonable(obj), indent=2, sort_keys=True))


# -- commands -----------------------------------------------------------------


def cmd_analyze(args) -> int:
    form = DiagonalForm.parse(args.form)
    rep = local_report(form, mode=args.mode)
    series = series_truncated(form, args.series_q)
    out = {"form": str(form), "local": rep.to_dict(), "series": series.to_dict()}
    if form.s > form.k:
        quad = singular_integral_quadrature(form)
        mc = singular_integral_slab_mc(form, n=args.integral_samples, stream=SeededStream(args.seed))
        out["integral"] = {"quadrature": quad.to_dict(), "slab_mc": mc.to_dict()}
        J = quad.value
    else:
        out["integral"] = {"skipped": f"s={form.s} <= k={form.k}: the integral does not converge absolutely"}
        J = None
    pset = local_prime_set(form, rep.mode)
    cert = series_lower_certificate(form, pset.profile)
    log10 = None
    if cert.value:
        log10 = math.log10(cert.value.numerator) - math.log10(cert.value.denominator)
    out["certificate"] = {"value": cert.value, "log10": log10, "reason": cert.reason}
    if args.box is not None:
        if rep.overall == "locally_insoluble":
            pred = 0.0
        else:
            pred = None if J is None else J * series.partial_sum * args.box ** (form.s - form.k)
        out["prediction"] = {"box": args.box, "rho_predicted": pred}
    _emit(out)
    return 0


def cmd_search(args) -> int:
    form = DiagonalForm.parse(args.form)
    _emit({"form": str(form), **smallest_solution(form, args.max_norm, args.budget).to_dict()})
    return 0


def cmd_count(args) -> int:
    form = DiagonalForm.parse(args.form)
    mode = CountMode.parse(args.mode)
    _emit({"form": str(form), "box": args.box, "mode": mode.value, "count": count_solutions(form, args.box, mode)})
    return 0


def _summary(record) -> None:
    res = record.results
    print(f"kind={record.kind} seed={record.seed} hash={record.canonical_hash[:16]}")
    rows = []
    if record.kind == "local_density":
        rows.append(("locally soluble", res["locally_soluble"]))
    elif record.kind == "small_solutions":
        rows += [(f"C={e['C']}", e) for e in res["per_C"]]
    elif record.kind == "hasse":
        rows.append(("found (among locally soluble)", res["found"]))
    for label, e in rows:
        frac = "n/a" if e["fraction"] is None else f"{e['fraction']:.4f}"
        print(f"  {label:<32} {e['successes']:>6}/{e['n']:<6} {frac}  95% CI [{e['ci95'][0]:.4f}, {e['ci95'][1]:.4f}]")
    if res.get("caveat"):
        print(f"  caveat: {res['caveat']}")


def cmd_survey(args) -> int:
    if args.kind == "local":
        rec = ex.survey_local_density(args.k, args.s, args.A, args.n, args.seed, args.mode, args.workers)
    elif args.kind == "small-solutions":
        if not args.C:
            raise DomainError("small-solutions needs --C")
        rec = ex.survey_small_solutions(args.k, args.s, args.A, args.C, args.n, args.seed, args.workers)
    else:
        if args.B is None:
            raise DomainError("hasse needs --B")
        rec = ex.survey_hasse(args.k, args.s, args.A, args.B, args.n, args.seed, args.mode, workers=args.workers)
    run_store_append(rec, args.out)
    _summary(rec)
    return 0


def cmd_xi(args) -> int:
    _emit({"k": args.k, "s": args.s, "A": args.A, "B": args.B, "xi": xi_count(args.k, args.s, args.A, args.B)})
    return 0


def cmd_upsilon(args) -> int:
    _emit({"k": args.k, "t": args.t, "A": args.A, "B": args.B, "upsilon": upsilon_count(args.k, args.t, args.A, args.B)})
    return 0


def cmd_pairs(args) -> int:
    _emit({"B": args.B, "d": args.d, "k": args.K, "pairs": congruent_power_pairs(args.B, args.d, args.K)})
    return 0


def cmd_variance(args) -> int:
    rec = ex.variance_experiment(args.k, args.s, args.A, args.B, args.series_q, seed=args.seed)
    if args.out:
        run_store_append(rec, args.out)
    _emit(rec.to_dict())
    return 0


def cmd_lattice(args) -> int:
    res = ex.duality_check(args.n, args.trials, args.seed)
    ok = res["duality_ok"] == res["trials"] and res["routes_ok"] == res["trials"]
    print(f"duality {res['duality_ok']}/{res['trials']}  gram=minors {res['routes_ok']}/{res['trials']}  {'PASS' if ok else 'FAIL'}")
    for f in res["failures"]:
        print(f"  failed trial {f['trial']}: {f['basis']}")
    return 0 if ok else 1


def cmd_adversarial(args) -> int:
    if args.family == "pq":
        form = adversarial_pq(args.k, args.t, args.p)
        search = smallest_solution(form, args.p - 1)
        verdict = padic_soluble(form, args.p)
        report = {
            "claim": f"no nonzero solution with sup-norm < {args.p}",
            "search": search.to_dict(),
            "verified": not search.found,
            "padic_at_p": verdict.to_dict(),
        }
    else:
        form = adversarial_ab(args.k, args.t, args.a, args.b)
        bound = args.max_norm
        search = smallest_solution(form, bound)
        sols = list(enumerate_solutions(form, bound))
        bad = [list(x) for x in sols if sum(v**args.k for v in x[: args.t]) % args.b]
        report = {
            "claim": f"{args.b} divides x_1^k + ... + x_t^k for every solution",
            "search": search.to_dict(),
            "solutions_checked": len(sols),
            "violations": bad,
            "verified": not bad,
        }
    _emit({"form": str(form), **report})
    return 0


def _flatten(prefix: str, obj, out: dict) -> None:
    if isinstance(obj, dict) and obj:
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}", v, out)
    elif isinstance(obj, (list, dict)):
        out[prefix] = canonical_json(obj)
    else:
        out[prefix] = obj


def cmd_export(args) -> int:
    rows = []
    for rec in run_store_read(args.inp):
        row = {"kind": rec.kind, "seed": rec.seed, "canonical_hash": rec.canonical_hash,
               "timestamp": rec.provenance.get("timestamp")}
        _flatten("params", rec.params, row)
        _flatten("results", rec.results, row)
        rows.append(row)
    fixed = ["kind", "seed", "canonical_hash", "timestamp"]
    extra = sorted({c for r in rows for c in r} - set(fixed))
    w = csv.DictWriter(sys.stdout, fieldnames=fixed + extra, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="diagsolve", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="local report, series, integral and certificate for one form")
    p.add_argument("--form", required=True, help='e.g. "k=3 a=1,-2,7,-14"')
    p.add_argument("--mode", choices=["rigorous", "heuristic"])
    p.add_argument("--series-q", type=int, default=200)
    p.add_argument("--integral-samples", type=int, default=200_000)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--box", type=int)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("search", help="smallest nonzero solution up to a sup-norm")
    p.add_argument("--form", required=True)
    p.add_argument("--max-norm", type=int, required=True)
    p.add_argument("--budget", type=int, default=10**7)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("count", help="exact number of solutions in a box")
    p.add_argument("--form", required=True)
    p.add_argument("--box", type=int, required=True)
    p.add_argument("--mode", choices=["all-nonzero", "vector-nonzero"], default="all-nonzero")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("survey", help="seeded survey; appends a record to --out")
    p.add_argument("kind", choices=["local", "small-solutions", "hasse"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--B", type=int)
    p.add_argument("--C", type=_floats, help="comma-separated list, e.g. 0.5,1,2")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=_u64, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=["rigorous", "heuristic"])
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_survey)

    p = sub.add_parser("xi", help="exact count of pairs (a, x) with a.x^k = 0")
    for name in ("k", "s", "A", "B"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.set_defaults(func=cmd_xi)

    p = sub.add_parser("upsilon", help="sum over coefficient vectors of rho_a(B)^2")
    for name in ("k", "t", "A", "B"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.set_defaults(func=cmd_upsilon)

    p = sub.add_parser("pairs", help="pairs |u|, |v| <= B with u^k = v^k mod d")
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--K", type=int, required=True, help="the exponent k")
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("variance", help="exact variance sum over all |a| <= A")
    for name in ("k", "s", "A", "B"):
        p.add_argument(f"--{name}", type=int, required=True)
    p.add_argument("--series-q", type=int, default=200)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_variance)

    p = sub.add_parser("lattice", help="lattice identity checks")
    lsub = p.add_subparsers(dest="lattice_command", required=True)
    q = lsub.add_parser("check-duality", help="random-basis check of the dual discriminant identity")
    q.add_argument("--n", type=int, required=True, help="largest ambient dimension")
    q.add_argument("--trials", type=int, required=True)
    q.add_argument("--seed", type=_u64, required=True)
    q.set_defaults(func=cmd_lattice)

    p = sub.add_parser("adversarial", help="instances with provably large minimal solutions")
    asub = p.add_subparsers(dest="family", required=True)
    q = asub.add_parser("pq")
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--t", type=int, required=True)
    q.add_argument("--p", type=int, required=True)
    q.set_defaults(func=cmd_adversarial)
    q = asub.add_parser("ab")
    for name in ("k", "t", "a", "b"):
        q.add_argument(f"--{name}", type=int, required=True)
    q.add_argument("--max-norm", type=int, default=6, help="search and verification box")
    q.set_defaults(func=cmd_adversarial)

    p = sub.add_parser("export", help="flatten a run store to CSV", epilog=EXPORT_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--format", choices=["csv"], default="csv")
    p.set_defaults(func=cmd_export)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DiagsolveError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())

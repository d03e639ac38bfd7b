"""Command-line front end.  Exit codes: 0 ok, 2 bad input/precondition, 3 failed verification."""
import argparse
import json
import sys
from fractions import Fraction

from .errors import QFError, VerificationError
from .euclid import EIdeal, assignment_violations, motzkin_search, similar_density
from .field import make_field
from .ideals import Ideal, class_group
from .sieve import build_panel, large_sieve_panel
from .survey import (CContext, b1_count, b2_lower_bound, certify_fixtures, parse_ideal_spec,
                     scan, scan_csv_lines)


def _ints(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _emit(lines):
    for line in lines:
        print(line)


def cmd_field_info(args):
    F = make_field(args.d)
    G = class_group(F)
    info = {"d": F.d, "disc": F.disc, "omega": F.omega_str, "signature": F.signature,
            "torsion_order": len(F.torsion_units), "class_number": G.h}
    if F.is_real:
        info["fundamental_unit"] = F.fundamental_unit.pretty()
        info["fundamental_unit_norm"] = F.fundamental_unit.norm()
    print(json.dumps(info, sort_keys=True, indent=1))


def cmd_classgroup(args):
    F = make_field(args.d)
    G = class_group(F)
    body = {"d": F.d, "h": G.h,
            "generator": list(G.generator.hnf_triple()) if G.generator else None,
            "representatives": [list(R.hnf_triple()) for R in G.reps]}
    print(json.dumps(body, sort_keys=True, indent=1))


def _scan_kw(args):
    return {"jobs": args.jobs, "cache_dir": args.cache, "use_cache": not args.no_cache}


def cmd_scan(args):
    _emit(scan_csv_lines(scan(args.d, args.ideal, args.x, **_scan_kw(args))))


def _report(rep, out):
    if out == "json":
        print(rep.to_json())
    else:
        _emit(rep.csv_lines())


def cmd_b1(args):
    _report(b1_count(args.d, args.ideal, args.grid, **_scan_kw(args)), args.out)


def cmd_b2(args):
    _report(b2_lower_bound(args.d, args.ideal, args.grid, args.height, **_scan_kw(args)), args.out)


def cmd_certify(args):
    ctx = CContext(args.d, args.ideal)
    L = motzkin_search(ctx.C, ctx.G, args.norm_bound, args.height, args.depth, args.mode)
    bad = assignment_violations(L)
    if bad:
        raise VerificationError(bad[0])
    print(L.to_json(), end="")
    if L.unassigned:
        print(f"coverage incomplete: {len(L.unassigned)} ideal(s) unassigned", file=sys.stderr)


def cmd_fixtures(args):
    res = certify_fixtures(args.norm_bound, args.height, args.depth)
    print(json.dumps([r.to_dict() for r in res], sort_keys=True, indent=1))


def cmd_sieve(args):
    ctx = CContext(args.d, args.ideal)
    panel = build_panel(ctx.C, args.n, args.x, args.q, ctx.G)
    print(large_sieve_panel(panel).to_json())


def _element(F, text):
    parts = _ints(text)
    if len(parts) == 2:
        parts.append(1)
    if len(parts) != 3 or parts[2] == 0:
        raise argparse.ArgumentTypeError("element must be a,b[,den]")
    return F(*parts)


def cmd_density(args):
    ctx = CContext(args.d, args.ideal)
    inv = parse_ideal_spec(ctx.F, args.inv, ctx.G)
    x = _element(ctx.F, args.coset)
    count, wits = similar_density(x, EIdeal(inv), ctx.C, args.x, args.height)
    body = {"count": count,
            "witnesses": [{"prime": list(q.hnf_triple()), "norm": q.norm, "y": [y.a, y.b]}
                          for q, y in wits]}
    print(json.dumps(body, sort_keys=True, indent=1))


def build_parser():
    ap = argparse.ArgumentParser(prog="qfeuclid",
                                 description="Euclidean ideal computations in quadratic fields")
    sub = ap.add_subparsers(dest="command", required=True)

    def field_cmd(name, fn, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--d", type=int, required=True, help="square-free d of Q(sqrt d)")
        p.set_defaults(fn=fn)
        return p

    def ideal_arg(p):
        p.add_argument("--ideal", default="gen", help="C: unit, gen, or HNF a,b,c (default gen)")

    def scan_args(p):
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--cache", default=None, help="cache directory (default $QFEUCLID_CACHE_DIR)")
        p.add_argument("--no-cache", action="store_true")

    field_cmd("field-info", cmd_field_info, "basis, unit and class number")
    field_cmd("classgroup", cmd_classgroup, "cyclic class group and generator")

    p = field_cmd("scan", cmd_scan, "per-prime records as CSV")
    ideal_arg(p)
    p.add_argument("--x", type=int, required=True)
    scan_args(p)

    for name, fn, help in (("b1-count", cmd_b1, "level-1 prime counts"),
                           ("b2-bound", cmd_b2, "certified level<=2 counts")):
        p = field_cmd(name, fn, help)
        ideal_arg(p)
        p.add_argument("--grid", type=_ints, required=True)
        p.add_argument("--out", choices=("csv", "json"), default="csv")
        if name == "b2-bound":
            p.add_argument("--height", type=int, default=20)
        scan_args(p)

    p = field_cmd("certify", cmd_certify, "bounded Motzkin search, verified")
    ideal_arg(p)
    p.add_argument("--norm-bound", type=int, default=30)
    p.add_argument("--height", type=int, default=20)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--mode", choices=("E", "B"), default="E")
    p.add_argument("--out", choices=("json",), default="json")

    p = sub.add_parser("certify-fixtures", help="certify the seven imaginary fixture fields")
    p.add_argument("--norm-bound", type=int, default=30)
    p.add_argument("--height", type=int, default=20)
    p.add_argument("--depth", type=int, default=6)
    p.set_defaults(fn=cmd_fixtures)

    p = field_cmd("sieve-panel", cmd_sieve, "large-sieve quantities for a standard panel")
    ideal_arg(p)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--out", choices=("json",), default="json")

    p = field_cmd("density", cmd_density, "count primes similar to a coset")
    ideal_arg(p)
    p.add_argument("--inv", default="unit", help="I^-1 as unit or HNF a,b,c")
    p.add_argument("--coset", required=True, help="x = (a + b*w)/den as a,b[,den]")
    p.add_argument("--x", type=int, default=1000)
    p.add_argument("--height", type=int, default=30)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args.fn(args)
    except VerificationError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return 3
    except (QFError, ValueError, argparse.ArgumentTypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

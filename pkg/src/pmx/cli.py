"""``pmx`` command-line front end.

Ideal arguments accept ``P<t>``, ``I<t>``, ``Q`` (the saturation of
P_{n-1} by det), ``det``, ``f``, a path to an ideal file, or generators
separated by ``;``.  Polynomial arguments accept ``det``, ``f`` or
polynomial text.

Exit codes: 0 success (budget skips included), 1 a check failed or a
computation raised, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys

from . import __version__
from .groebner import (Budget, BudgetExceeded, Ideal, codim, colon, colon_ideal, format_ideal,
                       ideal_member, intersect, load_ideal, saturate)
from .minors import (determinant, determinantal_ideal, f_polynomial, matrix_ring,
                     principal_minor_ideal, q_ideal)
from .poly import Field, TermOrder
from .strata import SampleConfig, estimate_codim, exhaustive_count
from .verify import REGISTRY, CheckError, CheckSpec, run_check, run_suite, summary

EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# argument resolution


def _field(args) -> Field:
    try:
        return Field.parse(args.field)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _budget(args) -> Budget:
    return Budget.default().with_(max_pairs=args.budget_pairs, max_terms=args.budget_terms)


def _ring(args, specs=()):
    """Ring of the first ideal file among ``specs``, else the --n/--field ring."""
    for s in specs:
        if os.path.isfile(s):
            return load_ideal(s).ring
    if args.n < 1:
        raise UsageError("--n must be positive")
    return matrix_ring(args.n, _field(args))


def _poly(text: str, ring):
    """Polynomial text in which ``det`` and ``f`` stand for those polynomials."""
    subs = {}
    if re.search(r"\bdet\b", text):
        subs["det"] = determinant(ring)
    if re.search(r"\bf\b", text):
        if ring.matrix_size != 4:
            raise UsageError("f is defined for n = 4")
        subs["f"] = f_polynomial(ring)
    for name, g in subs.items():
        text = re.sub(rf"\b{name}\b", f"({g})", text)
    try:
        return ring.parse(text)
    except ValueError as e:
        raise UsageError(f"cannot parse polynomial {text!r}: {e}") from None


def _ideal(spec: str, ring, budget) -> Ideal:
    n, field = ring.matrix_size, ring.field
    m = re.fullmatch(r"([PI])(\d+)", spec)
    if m:
        t = int(m.group(2))
        if not 1 <= t <= n:
            raise UsageError(f"{spec}: t out of range for n={n}")
        make = principal_minor_ideal if m.group(1) == "P" else determinantal_ideal
        return make(n, t, field, ring=ring)
    if spec == "Q":
        return q_ideal(n, field, budget)
    if spec in ("det", "f"):
        return Ideal(ring, [_poly(spec, ring)], name=spec)
    if os.path.isfile(spec):
        I = load_ideal(spec)
        if I.ring != ring:
            raise UsageError(f"{spec}: ring differs from the other arguments")
        return I
    parts = [s for s in (x.strip() for x in spec.split(";")) if s]
    if not parts:
        raise UsageError(f"empty ideal {spec!r}")
    return Ideal(ring, [_poly(s, ring) for s in parts], name=spec)


# ---------------------------------------------------------------------------
# commands; each returns (status, human text, json payload)


def _gens(I):
    return [str(g) for g in I.gens]


def cmd_gb(args):
    ring = _ring(args, [args.ideal])
    try:
        order = TermOrder.parse(args.order)
    except ValueError as e:
        raise UsageError(str(e)) from None
    G = _ideal(args.ideal, ring, _budget(args)).groebner(order, _budget(args))
    polys = [str(g) for g in G.polys]
    return "ok", "\n".join(polys), {"order": args.order, "basis": polys}


def cmd_nf(args):
    ring = _ring(args, [args.ideal])
    f = _poly(args.poly, ring)
    G = _ideal(args.ideal, ring, _budget(args)).groebner(budget=_budget(args))
    r = str(G.normal_form(f))
    return "ok", r, {"normal_form": r}


def cmd_member(args):
    ring = _ring(args, [args.ideal])
    f = _poly(args.poly, ring)
    inside = ideal_member(f, _ideal(args.ideal, ring, _budget(args)), _budget(args))
    return "ok", str(inside).lower(), {"member": inside}


def cmd_intersect(args):
    ring = _ring(args, [args.a, args.b])
    b = _budget(args)
    K = intersect(_ideal(args.a, ring, b), _ideal(args.b, ring, b), b)
    gens = [str(g) for g in K.groebner(budget=b).polys]
    return "ok", "\n".join(gens), {"basis": gens}


def cmd_colon(args):
    ring = _ring(args, [args.a, args.b])
    b = _budget(args)
    A = _ideal(args.a, ring, b)
    B = _ideal(args.b, ring, b)
    K = colon(A, B.gens[0], b) if len(B.gens) == 1 else colon_ideal(A, B, b)
    gens = [str(g) for g in K.groebner(budget=b).polys]
    return "ok", "\n".join(gens), {"basis": gens}


def cmd_saturate(args):
    ring = _ring(args, [args.a])
    b = _budget(args)
    K = saturate(_ideal(args.a, ring, b), _poly(args.poly, ring), b)
    gens = [str(g) for g in K.groebner(budget=b).polys]
    return "ok", "\n".join(gens), {"basis": gens}


def cmd_codim(args):
    ring = _ring(args, [args.ideal])
    c = codim(_ideal(args.ideal, ring, _budget(args)), _budget(args))
    return "ok", str(c), {"codim": c}


def cmd_ideal(args):
    ring = _ring(args)
    n, field, b = args.n, _field(args), _budget(args)
    t = args.t if args.t is not None else n - 1
    if args.kind in ("principal", "all") and not 1 <= t <= n:
        raise UsageError(f"--t {t} out of range for n={n}")
    if args.kind == "principal":
        I = principal_minor_ideal(n, t, field, ring=ring)
    elif args.kind == "all":
        I = determinantal_ideal(n, t, field, ring=ring)
    else:
        if n < 2:
            raise UsageError("q needs n >= 2")
        I = q_ideal(n, field, b)
    if args.write:
        with open(args.write, "w", encoding="utf-8") as fh:
            fh.write(format_ideal(I))
    gens = _gens(I)
    return "ok", "\n".join(gens), {"kind": args.kind, "n": n, "t": t, "generators": gens}


def cmd_count(args):
    if args.t is None:
        raise UsageError("count needs --t")
    try:
        c = exhaustive_count(args.n, args.q, args.t)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(c.to_csv())
    return "ok", c.to_csv().rstrip(), c.to_dict()


def cmd_estimate(args):
    if args.t is None:
        raise UsageError("estimate needs --t")
    try:
        cfg = SampleConfig(args.n, args.t, args.q, samples=args.samples or 10**6,
                           rank=args.rank, invertible=args.invertible, seed=args.seed,
                           workers=args.workers)
        est = estimate_codim(cfg, method=args.method)
    except ValueError as e:
        raise UsageError(str(e)) from None
    d = est.to_dict()
    if est.estimate is None:
        text = f"{est.status} (hits=0, N={est.samples})"
    else:
        text = (f"c = {est.estimate:.4f}  95% CI [{est.ci[0]:.4f}, {est.ci[1]:.4f}]  "
                f"hits={est.hits} N={est.samples} q={est.q} method={est.method}")
        if est.wide:
            text += "  (interval wider than tolerance)"
    return "ok", text, d


def _check_params(args, name):
    allowed = set(REGISTRY[name][1]) | {"field", "budget_pairs", "budget_terms", "budget_seconds"}
    raw = {"n": args.n_given, "t": args.t, "field": args.field, "seed": args.seed,
           "samples": args.samples, "budget_pairs": args.budget_pairs,
           "budget_terms": args.budget_terms, "q": getattr(args, "q", None),
           "f": getattr(args, "f", None), "expected": getattr(args, "expected", None),
           "workers": getattr(args, "workers", None),
           "budget_seconds": getattr(args, "budget_seconds", None)}
    return {k: v for k, v in raw.items() if v is not None and k in allowed}


def _report_text(r):
    line = f"{r.check} {json.dumps(r.params, sort_keys=True)}: {r.status}"
    if r.status in ("fail", "skip") and r.witnesses:
        line += "\n  " + json.dumps(r.witnesses[0], sort_keys=True)[:400]
    return line


def cmd_verify(args):
    if args.check not in REGISTRY:
        raise UsageError(f"unknown check {args.check!r}; known: {', '.join(REGISTRY)}")
    r = run_check(CheckSpec.make(args.check, **_check_params(args, args.check)), args.timing)
    return r.status, _report_text(r), r.to_dict()


def cmd_suite(args):
    specs = None
    if args.checks:
        bad = [c for c in args.checks if c not in REGISTRY]
        if bad:
            raise UsageError(f"unknown checks: {', '.join(bad)}")
        specs = [CheckSpec.make(c) for c in args.checks]
    shared = {"n": args.n_given, "t": args.t, "field": args.field, "seed": args.seed if args.seed else None,
              "samples": args.samples, "budget_pairs": args.budget_pairs,
              "budget_terms": args.budget_terms, "budget_seconds": args.budget_seconds}
    reports, code = run_suite(specs, shared, timing=args.timing, jobs=args.jobs)
    s = summary(reports)
    text = "\n".join(_report_text(r) for r in reports)
    text += "\n" + " ".join(f"{k}={v}" for k, v in s.items())
    return ("fail" if code else "pass"), text, {"reports": [r.to_dict() for r in reports],
                                                "summary": s}


# ---------------------------------------------------------------------------
# parser


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="matrix size (default 4)")
    common.add_argument("--t", type=int, default=None, help="minor size")
    common.add_argument("--field", default="Fp:32003", help="Q or Fp:<p> (default Fp:32003)")
    common.add_argument("--order", default="grevlex", choices=["grevlex", "lex"])
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=_positive, default=None)
    common.add_argument("--budget-pairs", type=_positive, default=None)
    common.add_argument("--budget-terms", type=_positive, default=None)
    common.add_argument("--json", metavar="PATH", default=None, help="write a JSON report")
    common.add_argument("--timing", action="store_true", help="record wall time in JSON")

    p = argparse.ArgumentParser(prog="pmx", description="Principal minor ideals toolkit.")
    p.add_argument("--version", action="version", version=f"pmx {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_, description=help_)
        sp.set_defaults(fn=fn)
        return sp

    add("gb", cmd_gb, "reduced Groebner basis").add_argument("ideal")
    sp = add("nf", cmd_nf, "normal form of a polynomial")
    sp.add_argument("poly")
    sp.add_argument("ideal")
    sp = add("member", cmd_member, "ideal membership test")
    sp.add_argument("poly")
    sp.add_argument("ideal")
    for name, fn, h in (("intersect", cmd_intersect, "intersection of two ideals"),
                        ("colon", cmd_colon, "colon ideal A : B")):
        sp = add(name, fn, h)
        sp.add_argument("a")
        sp.add_argument("b")
    sp = add("saturate", cmd_saturate, "saturation A : g^infinity")
    sp.add_argument("a")
    sp.add_argument("poly")
    add("codim", cmd_codim, "codimension (height)").add_argument("ideal")
    sp = add("ideal", cmd_ideal, "print generators of a named ideal")
    sp.add_argument("--kind", choices=["principal", "all", "q"], default="principal")
    sp.add_argument("--write", metavar="PATH", help="also write an ideal file")
    sp = add("count", cmd_count, "exhaustive point census by rank")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--csv", metavar="PATH")
    sp = add("estimate", cmd_estimate, "Monte Carlo codimension estimate")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--rank", type=int)
    sp.add_argument("--invertible", action="store_true")
    sp.add_argument("--method", choices=["auto", "count", "fiber"], default="auto")
    sp.add_argument("--workers", type=_positive, default=1)
    sp = add("verify", cmd_verify, "run one named check")
    sp.add_argument("check", help=", ".join(REGISTRY))
    sp.add_argument("--q", type=int)
    sp.add_argument("--f", help="override the quartic f (mutation testing)")
    sp.add_argument("--expected", type=int)
    sp.add_argument("--workers", type=_positive)
    sp.add_argument("--budget-seconds", type=float)
    sp = add("suite", cmd_suite, "run a list of checks (default: the full suite)")
    sp.add_argument("checks", nargs="*")
    sp.add_argument("--jobs", type=_positive, default=1)
    sp.add_argument("--budget-seconds", type=float)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    args.n_given = args.n
    if args.n is None:
        args.n = 4
    params = {k: v for k, v in sorted(vars(args).items())
              if k not in ("fn", "json", "timing", "n_given") and v is not None}
    try:
        status, text, payload = args.fn(args)
    except (UsageError, CheckError) as e:
        print(f"pmx {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as e:
        status, text, payload = "skip", f"skip(budget): {e.kind} > {e.limit}", {
            "budget": e.kind, "limit": e.limit}
    except (ValueError, ArithmeticError, OverflowError, RuntimeError) as e:
        print(f"pmx {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL
    print(text)
    if args.json:
        doc = {"command": args.command, "params": params, "status": status, "result": payload}
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return EXIT_FAIL if status == "fail" else 0


if __name__ == "__main__":
    sys.exit(main())

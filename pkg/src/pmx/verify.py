"""Named end-to-end checks with deterministic JSON reports.

Each check returns a :class:`Report` whose status is ``pass``, ``fail``,
``skip`` (a budget was exceeded) or ``inconclusive``.  A failing report
always carries a concrete witness: a polynomial with its normal form, an
index set, a matrix, or an estimate.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field
from functools import lru_cache
from math import comb

from .groebner import (Budget, BudgetExceeded, Ideal, codim, colon, colon_ideal,
                       ideal_equal, ideal_member, intersect, saturate,
                       singular_locus_codim, minimal_generators)
from .minors import (HOLLOW4, all_minors, cycle, derangements, determinant, determinantal_ideal,
                     duality_failures, f_polynomial, matrix_ring, muir_failures,
                     permutation_witness, principal_minor_ideal, principal_minors, q_ideal)
from .poly import Field, Polynomial, det, evaluate, multidegree
from .strata import SampleConfig, estimate_codim
from .toric import p2_certificate

STATUSES = ("pass", "fail", "skip", "inconclusive")


class CheckError(ValueError):
    """Unknown check or invalid parameters."""


@dataclass(frozen=True)
class CheckSpec:
    name: str
    params: tuple = ()

    @classmethod
    def make(cls, name: str, **params) -> "CheckSpec":
        return cls(name, tuple(sorted((k, v) for k, v in params.items() if v is not None)))

    @property
    def kwargs(self) -> dict:
        return dict(self.params)


@dataclass
class Report:
    check: str
    params: dict
    status: str
    witnesses: list = dc_field(default_factory=list)
    elapsed_ms: int | None = None
    seed: int | None = None
    field: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# shared constructions (cached per field and budget)


@lru_cache(maxsize=None)
def _n4(field: Field, budget: Budget):
    P3 = principal_minor_ideal(4, 3, field)
    I3 = determinantal_ideal(4, 3, field, ring=P3.ring)
    Q3 = q_ideal(4, field, budget)
    return P3, I3, Q3


def _f(p, ring):
    if p.get("f"):
        return ring.parse(p["f"])
    return f_polynomial(ring)


def corrupted_f(field: Field = Field(32003), term: int = 0) -> str:
    """f with the sign of one term flipped, for mutation testing."""
    f = f_polynomial(matrix_ring(4, field))
    items = f.items()
    c, e = items[term]
    g = Polynomial.from_terms(f.ring, [(-c if k == term else cc, ee)
                                      for k, (cc, ee) in enumerate(items)])
    return str(g)


def _poly_witness(g: Polynomial, I: Ideal, name: str, budget) -> dict:
    nf = I.groebner(budget=budget).normal_form(g)
    return {"poly": str(g), "ideal": name, "normal_form": str(nf), "member": not nf}


def _equality(A: Ideal, an: str, B: Ideal, bn: str, budget):
    """None when A == B; otherwise a GB element of one missing from the other."""
    if ideal_equal(A, B, budget):
        return None
    for X, xn, Y, yn in ((A, an, B, bn), (B, bn, A, an)):
        for g in X.groebner(budget=budget).polys:
            if not ideal_member(g, Y, budget):
                return {"relation": f"{xn} not subset of {yn}", **_poly_witness(g, Y, yn, budget)}
    return {"relation": f"{an} != {bn}", "note": "reduced bases differ"}


def _need(p, key, lo, hi):
    v = p[key]
    if not isinstance(v, int) or not lo <= v <= hi:
        raise CheckError(f"parameter {key}={v!r} outside [{lo}, {hi}]")
    return v


# ---------------------------------------------------------------------------
# checks; each returns (status, witnesses)


def _p2_ci(p, field, budget):
    n = _need(p, "n", 2, 4)
    P2 = principal_minor_ideal(n, 2, field)
    c, k = codim(P2, budget), len(P2.gens)
    w = [{"codim": c, "generators": k, "expected": comb(n, 2)}]
    return ("pass" if c == k == comb(n, 2) else "fail"), w


def _p2_prime(p, field, budget):
    n = _need(p, "n", 2, 4)
    cert = p2_certificate(n, field, budget)
    w = [{"binomial": cert.binomial, "invariants": cert.invariants,
          "saturated": cert.saturated, "lattice_ideal_equal": cert.lattice_ideal_equal}]
    if cert.lattice is not None:
        w[0]["lattice"] = [list(r) for r in cert.lattice.rows]
    return ("pass" if cert.ok else "fail"), w


def _p2_normal(p, field, budget):
    n = _need(p, "n", 2, 4)
    P2 = principal_minor_ideal(n, 2, field)
    c = codim(P2, budget)
    s = singular_locus_codim(P2, c, budget)
    w = [{"codim": c, "singular_locus_codim": s, "required": c + 2}]
    return ("pass" if s >= c + 2 else "fail"), w


def _t_range(p, n, lo, hi):
    if p.get("t") is None:
        return range(lo, hi + 1)
    return [_need(p, "t", lo, hi)]


def _muir(p, field, budget):
    n = _need(p, "n", 1, 4)
    bad = []
    for t in _t_range(p, n, 1, n):
        bad += [{"t": t, "rows": list(r), "cols": list(c), "difference": str(d)}
                for r, c, d in muir_failures(n, t)]
    return ("fail" if bad else "pass"), bad[:5]


def _duality(p, field, budget):
    n = _need(p, "n", 2, 4)
    bad = []
    for t in _t_range(p, n, 1, n - 1):
        bad += [{"t": t, "set": s if s == "image" else list(s),
                 "difference": None if d is None else str(d)}
                for s, d in duality_failures(n, t)]
    return ("fail" if bad else "pass"), bad[:5]


def _q_codim(p, field, budget):
    n = _need(p, "n", 2, 4)
    Q = q_ideal(n, field, budget)
    c = codim(Q, budget)
    return ("pass" if c == n else "fail"), [{"codim": c, "expected": n,
                                             "generators": [str(g) for g in Q.gens]}]


def _min_primes(p, field, budget):
    _need(p, "n", 4, 4)
    P3, I3, Q3 = _n4(field, budget)
    w, ok = [], True
    for A, an, B, bn in ((P3, "P3", I3, "I3"), (P3, "P3", Q3, "Q3")):
        for g in A.gens:
            if not ideal_member(g, B, budget):
                ok = False
                w.append({"relation": f"{an} not subset of {bn}", **_poly_witness(g, B, bn, budget)})
                break
    for A, an, B, bn in ((I3, "I3", Q3, "Q3"), (Q3, "Q3", I3, "I3")):
        g = next((g for g in A.gens if not ideal_member(g, B, budget)), None)
        if g is None:
            ok = False
            w.append({"relation": f"{an} subset of {bn}", "note": "every generator is a member"})
        else:
            w.append({"relation": f"{an} not subset of {bn}", **_poly_witness(g, B, bn, budget)})
    # the 4-cycle permutation matrix lies on V(Q3) but not on V(I3)
    M = permutation_witness(cycle(4)).matrix
    q_zero = all(not evaluate(g, M) for g in Q3.gens)
    i_vals = [str(g) for g in I3.gens if evaluate(g, M)]
    w.append({"matrix": [list(r) for r in M], "on_V(Q3)": q_zero, "off_V(I3)": bool(i_vals)})
    ok = ok and q_zero and bool(i_vals)
    return ("pass" if ok else "fail"), w


def _height_bound(p, field, budget):
    n = _need(p, "n", 1, 6)
    t = _need(p, "t", 1, n)
    c = codim(principal_minor_ideal(n, t, field), budget)
    bound = comb(n + 1, 2) - comb(t + 2, 2) + 4
    return ("pass" if c <= bound else "fail"), [{"codim": c, "bound": bound}]


def _qminors(p, field, budget):
    _need(p, "n", 4, 4)
    _, _, Q3 = _n4(field, budget)
    X = Q3.ring.generic_matrix()
    cands = [(f"x[{i + 1},{j + 1}]", X[i][j]) for i in range(4) for j in range(4)]
    cands += [(f"minor({list(r)};{list(c)})", m) for (r, c), m in all_minors(X, 2).items()]
    bad = [{"minor": name, **_poly_witness(m, Q3, "Q3", budget)}
           for name, m in cands if ideal_member(m, Q3, budget)]
    return ("fail" if bad else "pass"), bad or [{"checked": len(cands)}]


def _n4_reduced(p, field, budget):
    P3, I3, Q3 = _n4(field, budget)
    w = _equality(intersect(I3, Q3, budget), "I3 cap Q3", P3, "P3", budget)
    return ("fail", [w]) if w else ("pass", [])


def _n4_linked(p, field, budget):
    P3, I3, Q3 = _n4(field, budget)
    w = [x for x in (_equality(colon_ideal(P3, I3, budget), "P3:I3", Q3, "Q3", budget),
                     _equality(colon_ideal(P3, Q3, budget), "P3:Q3", I3, "I3", budget)) if x]
    return ("fail", w) if w else ("pass", [])


def _n4_fgen(p, field, budget):
    P3, I3, Q3 = _n4(field, budget)
    f = _f(p, P3.ring)
    w = []
    eq = _equality(Q3, "Q3", P3 + Ideal(P3.ring, [f]), "P3+(f)", budget)
    if eq:
        w.append(eq)
    if ideal_member(f, P3, budget):
        w.append({"relation": "f in P3", **_poly_witness(f, P3, "P3", budget)})
    return ("fail", w) if w else ("pass", [{"f": str(f)}])


def _n4_colon(p, field, budget):
    P3, I3, Q3 = _n4(field, budget)
    f = _f(p, P3.ring)
    D = determinant(P3.ring)
    w = []
    eq = _equality(colon(P3, D, budget), "P3:det", Q3, "Q3", budget)
    if eq:
        w.append(eq)
    if not ideal_member(f * D, P3, budget):
        w.append({"relation": "f*det not in P3", **_poly_witness(f * D, P3, "P3", budget)})
    return ("fail", w) if w else ("pass", [])


def _witnesses(p, field, budget):
    n = _need(p, "n", 2, 6)
    bad = []
    d = det(HOLLOW4, 1)
    pm = {str(list(s)): v for s, v in principal_minors(HOLLOW4, 3).items()}
    if d != -1 or any(pm.values()):
        bad.append({"matrix": [list(r) for r in HOLLOW4], "det": d, "principal_3_minors": pm})
    count = 0
    for perm in derangements(n):
        W = permutation_witness(perm)
        d = det(W.matrix, 1)
        nz = [list(s) for s, v in principal_minors(W.matrix, n - 1).items() if v]
        count += 1
        if d not in (1, -1) or nz:
            bad.append({"perm": list(perm), "det": d, "nonzero_minors": nz})
    return ("fail" if bad else "pass"), bad or [{"hollow_det": -1, "derangements": count}]


def _multigrade(p, field, budget):
    _need(p, "n", 4, 4)
    ring = matrix_ring(4, field)
    f = _f(p, ring)
    bad = []
    md = multidegree(f)
    if md is None or md.rows != (1,) * 4 or md.cols != (1,) * 4:
        bad.append({"poly": "f", "multidegree": None if md is None else str(md)})
    X = ring.generic_matrix()
    for t in range(1, 5):
        for s, m in principal_minors(X, t).items():
            md = multidegree(m)
            ind = tuple(1 if i + 1 in s else 0 for i in range(4))
            if md is None or md.rows != ind or md.cols != ind:
                bad.append({"poly": f"mu{list(s)}", "multidegree": None if md is None else str(md)})
    return ("fail" if bad else "pass"), bad or [{"f": "(1,1,1,1;1,1,1,1)"}]


def expected_codim(n: int, t: int) -> int | None:
    """Codimension of Y_{n,n,t} in n x n matrices where it is known."""
    if t == 1 or t == n - 1:
        return n
    if t == n - 2:
        return comb(n, 2)
    return None


def _strata(p, field, budget):
    n = _need(p, "n", 2, 6)
    t = _need(p, "t", 1, n - 1)
    exp = p.get("expected") or expected_codim(n, t)
    if exp is None:
        raise CheckError(f"no expected codimension known for n={n}, t={t}; pass expected=")
    q = p.get("q") or (101 if exp <= 4 else 5)
    cfg = SampleConfig(n, t, q, samples=p.get("samples") or 10**7, invertible=True,
                       seed=p.get("seed") or 0, workers=p.get("workers") or 1)
    est = estimate_codim(cfg, tol=p.get("tol") or 0.5)
    w = [{**est.to_dict(), "expected": exp}]
    if est.estimate is None:
        return "inconclusive", w
    return ("pass" if abs(est.estimate - exp) <= (p.get("tol") or 0.5) else "fail"), w


def _conj_explore(p, field, budget):
    n = _need(p, "n", 2, 6)
    secs = p.get("budget_seconds") or 60
    budget = budget.with_(max_seconds=secs)
    P = principal_minor_ideal(n, n - 1, field)
    data = {"n": n, "budget_seconds": secs}
    try:
        S = saturate(P, determinant(P.ring), budget)
        gens = minimal_generators(S, budget)
        data["saturation_generators"] = len(gens)
        data["max_degree"] = max(g.total_degree for g in gens)
        data["equals_P"] = ideal_equal(S, P, budget)
    except BudgetExceeded as e:
        data["budget"] = {"kind": e.kind, "limit": e.limit}
    return "inconclusive", [data]


# name -> (function, allowed params with defaults)
_COMMON = {"field": "Fp:32003", "budget_pairs": None, "budget_terms": None,
           "budget_seconds": None}
REGISTRY = {
    "p2-ci": (_p2_ci, {"n": 3}),
    "p2-prime": (_p2_prime, {"n": 3}),
    "p2-normal": (_p2_normal, {"n": 3}),
    "muir": (_muir, {"n": 4, "t": None}),
    "duality": (_duality, {"n": 4, "t": None}),
    "q-codim": (_q_codim, {"n": 4}),
    "min-primes": (_min_primes, {"n": 4}),
    "height-bound": (_height_bound, {"n": 4, "t": 3}),
    "qminors": (_qminors, {"n": 4}),
    "n4-reduced": (_n4_reduced, {}),
    "n4-linked": (_n4_linked, {}),
    "n4-fgen": (_n4_fgen, {"f": None}),
    "n4-colon": (_n4_colon, {"f": None}),
    "witnesses": (_witnesses, {"n": 4}),
    "multigrade": (_multigrade, {"n": 4, "f": None}),
    "strata": (_strata, {"n": 4, "t": 3, "q": None, "samples": None, "seed": 0,
                         "expected": None, "tol": None, "workers": None}),
    "conj-explore": (_conj_explore, {"n": 5}),
}

DEFAULT_SUITE = (
    [CheckSpec.make("p2-ci", n=n) for n in (2, 3, 4)]
    + [CheckSpec.make("p2-prime", n=n) for n in (2, 3, 4)]
    + [CheckSpec.make("p2-normal", n=3), CheckSpec.make("p2-normal", n=4)]
    + [CheckSpec.make("muir", n=n) for n in (2, 3, 4)]
    + [CheckSpec.make("duality", n=n) for n in (2, 3, 4)]
    + [CheckSpec.make("q-codim", n=n) for n in (2, 3, 4)]
    + [CheckSpec.make("min-primes")]
    + [CheckSpec.make("height-bound", n=n, t=t) for n, t in ((2, 1), (4, 2), (4, 3))]
    + [CheckSpec.make(x) for x in ("qminors", "n4-reduced", "n4-linked", "n4-fgen", "n4-colon")]
    + [CheckSpec.make("witnesses", n=n) for n in (3, 4, 5)]
    + [CheckSpec.make("multigrade")]
    + [CheckSpec.make("strata", n=3, t=2), CheckSpec.make("strata", n=4, t=3),
       CheckSpec.make("strata", n=4, t=2)]
)


def resolve(spec: CheckSpec) -> dict:
    """Validated parameter dict with defaults filled in."""
    if spec.name not in REGISTRY:
        raise CheckError(f"unknown check {spec.name!r}; known: {', '.join(REGISTRY)}")
    _, defaults = REGISTRY[spec.name]
    allowed = {**_COMMON, **defaults}
    given = spec.kwargs
    extra = set(given) - set(allowed)
    if extra:
        raise CheckError(f"check {spec.name} does not take {', '.join(sorted(extra))}")
    p = {**allowed, **given}
    try:
        p["field"] = str(Field.parse(str(p["field"])))
    except ValueError as e:
        raise CheckError(str(e)) from None
    return {k: v for k, v in p.items() if v is not None}


def run_check(spec: CheckSpec, timing: bool = False) -> Report:
    fn, _ = REGISTRY.get(spec.name, (None, None))
    p = resolve(spec)
    field = Field.parse(p["field"])
    budget = Budget.default().with_(max_pairs=p.get("budget_pairs"),
                                    max_terms=p.get("budget_terms"),
                                    max_seconds=p.get("budget_seconds"))
    start = time.perf_counter()
    try:
        status, w = fn(p, field, budget)
    except BudgetExceeded as e:
        status, w = "skip", [{"budget": e.kind, "limit": e.limit}]
    elapsed = round((time.perf_counter() - start) * 1000) if timing else None
    rep_field = f"Fp:{p['q']}" if spec.name == "strata" and "q" in p else p["field"]
    if spec.name == "strata" and w and "q" in w[0]:
        rep_field = f"Fp:{w[0]['q']}"
    return Report(spec.name, p, status, w, elapsed, p.get("seed"), rep_field)


def _run_one(args):
    spec, timing = args
    return run_check(spec, timing)


def run_suite(specs=None, shared: dict | None = None, timing: bool = False,
              jobs: int = 1):
    """Run checks (default suite if none given); returns (reports, exit code).

    ``shared`` parameters are applied to every check that accepts them.
    """
    specs = list(DEFAULT_SUITE if specs is None else specs)
    if not specs:
        raise CheckError("empty suite")
    shared = {k: v for k, v in (shared or {}).items() if v is not None}
    merged = []
    for s in specs:
        if s.name not in REGISTRY:
            raise CheckError(f"unknown check {s.name!r}")
        allowed = {**_COMMON, **REGISTRY[s.name][1]}
        extra = {k: v for k, v in shared.items() if k in allowed}
        merged.append(CheckSpec.make(s.name, **{**extra, **s.kwargs}))
    for s in merged:
        resolve(s)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            reports = list(ex.map(_run_one, [(s, timing) for s in merged]))
    else:
        reports = [run_check(s, timing) for s in merged]
    code = 1 if any(r.status == "fail" for r in reports) else 0
    return reports, code


def summary(reports) -> dict:
    out = {s: 0 for s in STATUSES}
    for r in reports:
        out[r.status] += 1
    out["total"] = len(reports)
    return out


def suite_json(reports) -> str:
    return json.dumps({"reports": [r.to_dict() for r in reports], "summary": summary(reports)},
                      sort_keys=True, indent=2)


def _rebuild(name: str, field: Field, params: dict) -> Ideal | None:
    P3 = principal_minor_ideal(4, 3, field)
    I3 = determinantal_ideal(4, 3, field, ring=P3.ring)
    Q3 = q_ideal(4, field)
    table = {
        "P3": lambda: P3, "I3": lambda: I3, "Q3": lambda: Q3,
        "P3+(f)": lambda: P3 + Ideal(P3.ring, [_f(params, P3.ring)]),
        "I3 cap Q3": lambda: intersect(I3, Q3),
        "P3:I3": lambda: colon_ideal(P3, I3),
        "P3:Q3": lambda: colon_ideal(P3, Q3),
        "P3:det": lambda: colon(P3, determinant(P3.ring)),
    }
    return table[name]() if name in table else None


def revalidate(report: Report) -> bool:
    """Recompute every polynomial witness's membership from scratch.

    True iff at least one witness was checked and all agree.
    """
    field = Field.parse(report.field or "Fp:32003")
    ring = matrix_ring(4, field)
    checked = False
    for w in report.witnesses:
        if "poly" not in w:
            continue
        ideal = _rebuild(w.get("ideal"), field, report.params)
        if ideal is None:
            continue
        if ideal_member(ring.parse(w["poly"]), ideal) != w["member"]:
            return False
        checked = True
    return checked

"""Buchberger's algorithm and the ideal operations built on it.

The engine works on packed monomials (see :class:`pmx.poly.Packing`) stored
in plain dicts / lists.  Over F_p coefficients are ints mod p; over Q they
are gmpy2 ``mpq`` values and every basis element is kept monic.

Pair handling: Gebauer-Moeller installation of the product and chain
criteria, sugar-degree selection.  For homogeneous input the sugar is the
true degree, so pairs are processed degree by degree and a degree bound may
truncate the computation (used for membership tests).
"""
from __future__ import annotations

import os
import re
import threading
import time
from dataclasses import dataclass, replace
from fractions import Fraction
from heapq import heapify, heappop, heappush
from itertools import combinations
from math import comb

from .poly import (BITS, Field, Packing, Polynomial, Ring, TermOrder, VALUE_MASK,
                   _minor)

try:
    from gmpy2 import mpq
except ImportError:  # pragma: no cover
    mpq = Fraction


class BudgetExceeded(RuntimeError):
    """A deterministic resource cap was hit; the answer is unknown."""

    def __init__(self, kind: str, limit):
        super().__init__(f"budget exceeded: {kind} > {limit}")
        self.kind = kind
        self.limit = limit


@dataclass(frozen=True)
class Budget:
    max_pairs: int = 10**6
    max_terms: int = 10**6
    max_seconds: float | None = None
    max_minors: int = 5000

    @classmethod
    def default(cls) -> "Budget":
        env = os.environ.get("PMX_BUDGET_PAIRS")
        return cls(max_pairs=int(env)) if env else cls()

    def with_(self, **kw) -> "Budget":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


# ---------------------------------------------------------------------------
# engine


def _to_engine(f: Polynomial, pk: Packing):
    p = f.ring.field.p
    enc = pk.from_epack
    if p:
        return {enc(k): c for k, c in f.terms.items()}
    return {enc(k): mpq(c) for k, c in f.terms.items()}


def _from_engine(ring: Ring, terms, pk: Packing) -> Polynomial:
    p = ring.field.p
    out = {}
    for m, c in terms:
        if not p:
            c = Fraction(int(c.numerator), int(c.denominator))
            c = c.numerator if c.denominator == 1 else c
        out[pk.to_epack(m)] = c
    return Polynomial(ring, out)


def _monic(terms, p):
    """Sorted term list scaled so the leading coefficient is 1."""
    lc = terms[0][1]
    if lc == 1:
        return terms
    if p:
        inv = pow(lc, -1, p)
        return [(m, c * inv % p) for m, c in terms]
    return [(m, c / lc) for m, c in terms]


class _Reducer:
    """Basis under construction plus a divisor cache for reduction."""

    def __init__(self, pk: Packing, p: int, budget: Budget, deadline):
        self.pk = pk
        self.p = p
        self.budget = budget
        self.deadline = deadline
        self.polys = []   # sorted term lists, monic
        self.lms = []
        self.cache = {}   # monomial -> (reducer index or -1, basis size checked)

    def add(self, terms):
        self.polys.append(terms)
        self.lms.append(terms[0][0])
        return len(self.polys) - 1

    def find(self, m):
        lms = self.lms
        nb = len(lms)
        g = self.pk.guard
        hit = self.cache.get(m)
        start = 0
        if hit is not None:
            j, start = hit
            if j >= 0 or start == nb:
                return j
        mg = m | g
        for i in range(start, nb):
            if (mg - lms[i]) & g == g:
                self.cache[m] = (i, nb)
                return i
        self.cache[m] = (-1, nb)
        return -1

    def reduce(self, d: dict, top_only=False):
        """Reduce ``d`` (consumed) modulo the basis; sorted term list out."""
        p = self.p
        max_terms = self.budget.max_terms
        polys = self.polys
        find = self.find
        heap = [-m for m in d]
        heapify(heap)
        out = []
        while heap:
            m = -heappop(heap)
            c = d.pop(m, None)
            if c is None:
                continue
            j = find(m)
            if j < 0:
                out.append((m, c))
                if top_only:
                    out.extend(sorted(d.items(), reverse=True))
                    return out
                continue
            g = polys[j]
            s = m - g[0][0]
            get = d.get
            if p:
                for mm, cc in g[1:]:
                    k = mm + s
                    v = get(k)
                    if v is None:
                        d[k] = -c * cc % p
                        heappush(heap, -k)
                    else:
                        v = (v - c * cc) % p
                        if v:
                            d[k] = v
                        else:
                            del d[k]
            else:
                for mm, cc in g[1:]:
                    k = mm + s
                    v = get(k)
                    if v is None:
                        d[k] = -c * cc
                        heappush(heap, -k)
                    else:
                        v = v - c * cc
                        if v:
                            d[k] = v
                        else:
                            del d[k]
            if len(d) > max_terms:
                raise BudgetExceeded("terms", max_terms)
        return out


def buchberger(polys, pk: Packing, p: int, budget: Budget, max_degree=None):
    """Reduced Groebner basis of engine-form polynomials.

    Returns ``(basis, complete)`` where ``basis`` is a list of monic sorted
    term lists, ascending by leading monomial, and ``complete`` is False
    when pairs above ``max_degree`` were skipped.
    """
    deadline = None if budget.max_seconds is None else time.monotonic() + budget.max_seconds
    red = _Reducer(pk, p, budget, deadline)
    deg = pk.degree
    lcm = pk.lcm
    guard = pk.guard

    def divides(a, b):
        return ((b | guard) - a) & guard == guard

    sugar = []
    support = []
    active = []      # indices of non-redundant basis elements
    pairs = []       # (sugar, lcm, i, j)
    truncated = False

    def install(terms, s):
        nonlocal pairs, active
        k = red.add(terms)
        sugar.append(s)
        h = terms[0][0]
        support.append(pk.support(h))
        sh = support[k]
        new = []
        for i in active:
            lm_i = red.lms[i]
            L = lcm(lm_i, h)
            ps = max(sugar[i] + deg(L) - deg(lm_i), s + deg(L) - deg(h))
            new.append((ps, L, i, k, (support[i] & sh) == 0))
        kept = []
        for idx, cand in enumerate(new):
            L = cand[1]
            if cand[4]:
                kept.append(cand)
                continue
            dominated = False
            for other in new[idx + 1:]:
                if divides(other[1], L):
                    dominated = True
                    break
            if not dominated:
                for other in kept:
                    if divides(other[1], L):
                        dominated = True
                        break
            if not dominated:
                kept.append(cand)
        survivors = []
        for pr in pairs:
            L, i, j = pr[1], pr[2], pr[3]
            if divides(h, L):
                Li = lcm(red.lms[i], h)
                Lj = lcm(red.lms[j], h)
                if Li != L and Lj != L:
                    continue
            survivors.append(pr)
        pairs = survivors + [c[:4] for c in kept if not c[4]]
        active = [i for i in active if not divides(h, red.lms[i])] + [k]

    # seed with the interreduced input, smallest leading monomial first
    seeds = []
    for d in polys:
        if not d:
            continue
        s = max(deg(m) for m in d)
        seeds.append((max(d), s, len(seeds), d))
    seeds.sort()
    for _, s, _, d in seeds:
        terms = red.reduce(dict(d))
        if terms:
            install(_monic(terms, p), s)

    processed = 0
    while pairs:
        best = min(pairs)
        pairs.remove(best)
        s, L, i, j = best
        if max_degree is not None and s > max_degree:
            truncated = True
            continue
        processed += 1
        if processed > budget.max_pairs:
            raise BudgetExceeded("pairs", budget.max_pairs)
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExceeded("seconds", budget.max_seconds)
        gi, gj = red.polys[i], red.polys[j]
        si, sj = L - gi[0][0], L - gj[0][0]
        d = {m + si: c for m, c in gi[1:]}
        get = d.get
        for m, c in gj[1:]:
            k = m + sj
            v = get(k)
            if v is None:
                d[k] = -c % p if p else -c
            else:
                v = (v - c) % p if p else v - c
                if v:
                    d[k] = v
                else:
                    del d[k]
        terms = red.reduce(d)
        if terms:
            install(_monic(terms, p), s)

    # reduced basis: minimal leading monomials, tails reduced
    final = _Reducer(pk, p, budget, deadline)
    for i in active:
        final.add(red.polys[i])
    out = []
    for t in final.polys:
        tail = final.reduce(dict(t[1:]))
        out.append([t[0]] + tail)
    out.sort(key=lambda t: t[0])
    return out, not truncated


class GroebnerBasis:
    """Reduced Groebner basis of an ideal for a fixed term order."""

    def __init__(self, ring: Ring, order: TermOrder, engine_terms, complete=True,
                 max_degree=None):
        self.ring = ring
        self.order = order
        self.packing = Packing(order, ring.nvars)
        self._terms = engine_terms
        self.complete = complete
        self.max_degree = max_degree
        self.polys = [_from_engine(ring, t, self.packing) for t in engine_terms]

    def __len__(self):
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    def __eq__(self, other):
        return (isinstance(other, GroebnerBasis) and self.order == other.order
                and self.ring == other.ring and self.polys == other.polys)

    def __hash__(self):
        return hash(tuple(self.polys))

    @property
    def leading_monomials(self):
        return [self.packing.decode(t[0][0]) for t in self._terms]

    def is_unit(self) -> bool:
        return len(self._terms) == 1 and self._terms[0][0][0] == 0

    def _reducer(self):
        r = _Reducer(self.packing, self.ring.field.p, Budget(), None)
        for t in self._terms:
            r.add(t)
        return r

    def normal_form(self, f: Polynomial) -> Polynomial:
        if f.ring != self.ring:
            raise ValueError("ring mismatch")
        if not f:
            return f
        terms = self._reducer().reduce(_to_engine(f, self.packing))
        return _from_engine(self.ring, terms, self.packing)

    def reduces_to_zero(self, f: Polynomial) -> bool:
        if not f:
            return True
        r = self._reducer()
        return not r.reduce(_to_engine(f, self.packing), top_only=True)


def groebner(I: "Ideal", order: TermOrder | None = None, budget: Budget | None = None,
             max_degree=None) -> GroebnerBasis:
    return I.groebner(order, budget, max_degree)


def normal_form(f: Polynomial, G: GroebnerBasis) -> Polynomial:
    return G.normal_form(f)


# ---------------------------------------------------------------------------
# ideals


_GREVLEX = TermOrder.grevlex()


class Ideal:
    """Finitely generated ideal with a per-order cache of reduced bases."""

    def __init__(self, ring: Ring, gens, name: str | None = None):
        gens = list(gens)
        for g in gens:
            if g.ring != ring:
                raise ValueError("generator from a different ring")
        self.ring = ring
        self.gens = [g for g in gens if g]
        self.name = name
        self._gb = {}
        self._lock = threading.Lock()

    def __repr__(self):
        label = self.name or "Ideal"
        return f"{label}<{len(self.gens)} gens in {self.ring}>"

    def __iter__(self):
        return iter(self.gens)

    def __len__(self):
        return len(self.gens)

    def __add__(self, other):
        if isinstance(other, Polynomial):
            other = [other]
        gens = other.gens if isinstance(other, Ideal) else list(other)
        return Ideal(self.ring, self.gens + gens)

    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.gens)

    def change_field(self, field) -> "Ideal":
        ring = self.ring.with_field(field)
        return Ideal(ring, [g.change_field(field) for g in self.gens], self.name)

    def groebner(self, order=None, budget=None, max_degree=None) -> GroebnerBasis:
        order = order or _GREVLEX
        budget = budget or Budget.default()
        cached = self._gb.get(order)
        if cached is not None and (cached.complete or (
                max_degree is not None and cached.max_degree is not None
                and max_degree <= cached.max_degree)):
            return cached
        if max_degree is not None and not self.is_homogeneous():
            max_degree = None
        pk = Packing(order, self.ring.nvars)
        polys = [_to_engine(g, pk) for g in self.gens]
        terms, complete = buchberger(polys, pk, self.ring.field.p, budget, max_degree)
        G = GroebnerBasis(self.ring, order, terms, complete, max_degree)
        self._store(order, G)
        return G

    def _store(self, order, G):
        with self._lock:
            old = self._gb.get(order)
            if old is None or not old.complete:
                self._gb[order] = G

    def seed(self, G: GroebnerBasis):
        """Record a known reduced basis (e.g. from an elimination)."""
        if G.ring != self.ring:
            raise ValueError("ring mismatch")
        self._store(G.order, G)

    def is_unit(self, budget=None) -> bool:
        return self.groebner(budget=budget).is_unit()

    def contains(self, f: Polynomial, budget=None) -> bool:
        return ideal_member(f, self, budget)

    def contains_ideal(self, J: "Ideal", budget=None) -> bool:
        return all(ideal_member(g, self, budget) for g in J.gens)


def ideal_member(f: Polynomial, I: Ideal, budget=None) -> bool:
    if f.ring != I.ring:
        raise ValueError("ring mismatch")
    if not f:
        return True
    bound = None
    if f.is_homogeneous() and I.is_homogeneous():
        bound = f.total_degree
    G = I.groebner(budget=budget, max_degree=bound)
    return G.reduces_to_zero(f)


def ideal_equal(I: Ideal, J: Ideal, budget=None) -> bool:
    if I.ring != J.ring:
        raise ValueError("ring mismatch")
    return I.groebner(budget=budget).polys == J.groebner(budget=budget).polys


def minimal_generators(I: Ideal, budget=None) -> list:
    """Minimal homogeneous generating set, chosen greedily by degree.

    Each candidate is kept iff it is not in the ideal of those kept so far;
    for graded ideals this selects a basis of I / mI degree by degree.
    Candidates are the reduced Groebner basis when it is cached, otherwise
    the given generators.
    """
    if not I.is_homogeneous():
        raise ValueError("minimal generators need a homogeneous ideal")
    G = I._gb.get(_GREVLEX)
    cands = list(G.polys) if G is not None and G.complete else list(I.gens)
    cands.sort(key=lambda g: g.total_degree)
    kept = []
    for g in cands:
        if kept and ideal_member(g, Ideal(I.ring, kept), budget):
            continue
        kept.append(g)
    return kept


def _aux_name(ring: Ring, base="t") -> str:
    name = base
    k = 0
    while name in ring.names:
        k += 1
        name = f"{base}{k}"
    return name


def _eliminate_trailing(big: Ideal, small: Ring, budget) -> Ideal:
    """Eliminate the variables of ``big.ring`` beyond ``small``'s."""
    nk = small.nvars
    order = TermOrder.block(range(nk, big.ring.nvars))
    G = big.groebner(order, budget)
    extra = BITS * (big.ring.nvars - nk)
    low = (1 << extra) - 1
    kept = [t for t in G._terms if not any(G.packing.to_epack(m) & low for m, _ in t)]
    polys = [_from_engine(big.ring, t, G.packing).restrict(small) for t in kept]
    out = Ideal(small, polys)
    # the block order restricted to the kept variables is grevlex on them
    pk = Packing(_GREVLEX, nk)
    seeded = [sorted(((pk.from_epack(k), c if small.field.p else mpq(c))
                      for k, c in f.terms.items()), reverse=True) for f in polys]
    seeded.sort(key=lambda t: t[0][0])
    out.seed(GroebnerBasis(small, _GREVLEX, seeded))
    return out


def eliminate(I: Ideal, variables, budget=None) -> Ideal:
    """Generators of I intersected with K[remaining variables]."""
    idx = sorted({v if isinstance(v, int) else I.ring.index(v) for v in variables})
    if any(not 0 <= v < I.ring.nvars for v in idx):
        raise ValueError("variable out of range")
    if not idx:
        return Ideal(I.ring, I.gens)
    G = I.groebner(TermOrder.block(idx), budget)
    mask = 0
    for v in idx:
        mask |= VALUE_MASK << (BITS * (I.ring.nvars - 1 - v))
    kept = [f for f, t in zip(G.polys, G._terms) if not any(k & mask for k in f.terms)]
    return Ideal(I.ring, kept)


def intersect(I: Ideal, J: Ideal, budget=None) -> Ideal:
    """I cap J via eliminating t from t*I + (1-t)*J."""
    if I.ring != J.ring:
        raise ValueError("ring mismatch")
    ring = I.ring
    big = ring.extend([_aux_name(ring)])
    t = big.var(ring.nvars)
    one_minus_t = big.one - t
    gens = [t * g.embed(big) for g in I.gens] + [one_minus_t * h.embed(big) for h in J.gens]
    return _eliminate_trailing(Ideal(big, gens), ring, budget)


def divide_exact(g: Polynomial, f: Polynomial) -> Polynomial:
    """g / f, raising ValueError if f does not divide g."""
    if not f:
        raise ZeroDivisionError("division by zero polynomial")
    ring = g.ring
    field = ring.field
    p = field.p
    pk = ring.grevlex
    fd = sorted(((pk.from_epack(k), c) for k, c in f.terms.items()), reverse=True)
    lm, lc = fd[0]
    inv = field.inv(lc)
    guard = pk.guard
    d = {pk.from_epack(k): c for k, c in g.terms.items()}
    heap = [-m for m in d]
    heapify(heap)
    q = {}
    while heap:
        m = -heappop(heap)
        c = d.pop(m, None)
        if c is None:
            continue
        if ((m | guard) - lm) & guard != guard:
            raise ValueError("inexact division")
        s = m - lm
        a = field.mul(c, inv)
        q[s] = a
        for mm, cc in fd[1:]:
            k = mm + s
            v = d.get(k)
            if v is None:
                d[k] = field.neg(field.mul(a, cc))
                heappush(heap, -k)
            else:
                v = field.sub(v, field.mul(a, cc))
                if v:
                    d[k] = v
                else:
                    del d[k]
    return Polynomial(ring, {pk.to_epack(m): c for m, c in q.items()})


def colon(I: Ideal, f: Polynomial, budget=None) -> Ideal:
    """I : f, from the generators of I cap (f) divided by f."""
    if not f:
        raise ValueError("colon by the zero polynomial")
    K = intersect(I, Ideal(I.ring, [f]), budget)
    return Ideal(I.ring, [divide_exact(g, f) for g in K.gens])


def colon_ideal(I: Ideal, J: Ideal, budget=None) -> Ideal:
    """I : J as the intersection of I : g over generators g of J.

    A generator g is skipped when the partial result K already satisfies
    K*g inside I, since then K is contained in I : g.
    """
    K = None
    for g in J.gens:
        if ideal_member(g, I, budget):
            continue
        if K is not None and all(ideal_member(k * g, I, budget) for k in K.gens):
            continue
        Kg = colon(I, g, budget)
        K = Kg if K is None else intersect(K, Kg, budget)
    if K is None:
        return Ideal(I.ring, [I.ring.one])
    return K


def saturate(I: Ideal, f: Polynomial, budget=None) -> Ideal:
    """I : f^infinity via eliminating t from I + (t*f - 1)."""
    if not f:
        raise ValueError("saturation by the zero polynomial")
    ring = I.ring
    big = ring.extend([_aux_name(ring)])
    t = big.var(ring.nvars)
    gens = [g.embed(big) for g in I.gens] + [t * f.embed(big) - big.one]
    return _eliminate_trailing(Ideal(big, gens), ring, budget)


def radical_member(f: Polynomial, I: Ideal, budget=None) -> bool:
    """True iff some power of f lies in I (Rabinowitsch trick)."""
    if not f:
        raise ValueError("zero polynomial")
    ring = I.ring
    big = ring.extend([_aux_name(ring)])
    t = big.var(ring.nvars)
    gens = [g.embed(big) for g in I.gens] + [t * f.embed(big) - big.one]
    return Ideal(big, gens).groebner(budget=budget).is_unit()


# ---------------------------------------------------------------------------
# dimension


def min_transversal(edges, nvars: int) -> int:
    """Smallest variable set meeting every support (edges are bitmasks)."""
    edges = sorted(set(edges), key=lambda e: bin(e).count("1"))
    minimal = []
    for e in edges:
        if not any(m & e == m for m in minimal):
            minimal.append(e)
    best = nvars + 1

    def lower_bound(es):
        # disjoint edges each need their own vertex
        used = 0
        n = 0
        for e in es:
            if not e & used:
                used |= e
                n += 1
        return n

    def rec(es, size):
        nonlocal best
        if not es:
            best = min(best, size)
            return
        if size + lower_bound(es) >= best:
            return
        e = es[0]
        v = e
        while v:
            bit = v & -v
            v ^= bit
            rec([x for x in es if not x & bit], size + 1)

    rec(minimal, 0)
    return best


def codim_monomial(supports, nvars: int) -> int:
    """Codimension of a monomial ideal given its generators' supports."""
    if any(s == 0 for s in supports):
        raise ValueError("improper ideal")
    return min_transversal(supports, nvars)


def codim(I: Ideal, budget=None) -> int:
    """Height of I: nvars - dim K[x]/I, read off the leading-term ideal."""
    G = I.groebner(budget=budget)
    if G.is_unit():
        raise ValueError("improper ideal has no codimension")
    if not G.polys:
        return 0
    sup = [G.packing.support(t[0][0]) for t in G._terms]
    return codim_monomial(sup, I.ring.nvars)


def dimension(I: Ideal, budget=None) -> int:
    return I.ring.nvars - codim(I, budget)


def is_complete_intersection(I: Ideal, budget=None) -> bool:
    """codim(I) equals the number of supplied generators."""
    G = I.groebner(budget=budget)
    if G.is_unit():
        raise ValueError("improper ideal")
    return codim(I, budget) == len(I.gens)


def jacobian(gens, ring: Ring):
    return [[g.diff(v) for v in range(ring.nvars)] for g in gens]


def singular_locus_codim(I: Ideal, c: int | None = None, budget=None) -> int:
    """Codimension of I + (c x c minors of the Jacobian), c = codim I.

    Returns ``nvars + 1`` when that ideal is the unit ideal (empty singular
    locus).
    """
    budget = budget or Budget.default()
    ring = I.ring
    if c is None:
        c = codim(I, budget)
    k = len(I.gens)
    count = comb(k, c) * comb(ring.nvars, c)
    if count > budget.max_minors:
        raise BudgetExceeded("minors", budget.max_minors)
    J = jacobian(I.gens, ring)
    memo = {}
    minors = []
    for rows in combinations(range(k), c):
        for cols in combinations(range(ring.nvars), c):
            m = _minor(J, rows, cols, memo, ring.one)
            if m:
                minors.append(m)
    S = Ideal(ring, I.gens + minors)
    if S.is_unit(budget):
        return ring.nvars + 1
    return codim(S, budget)


# ---------------------------------------------------------------------------
# ideal files

_HEADER = re.compile(r"ring\s+n\s*=\s*(\d+)\s+field\s*=\s*(\S+)\s*$")


def parse_ideal(text: str, name: str | None = None) -> Ideal:
    """Read ``ring n=<n> field=<Q|Fp:p>`` followed by one generator per line."""
    ring = None
    gens = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ring is None:
            m = _HEADER.match(line)
            if not m:
                raise ValueError(f"line {lineno}: expected 'ring n=<n> field=<Q|Fp:p>'")
            ring = Ring.matrix(int(m.group(1)), Field.parse(m.group(2)))
            continue
        try:
            gens.append(ring.parse(line))
        except ValueError as e:
            raise ValueError(f"line {lineno}: {e}") from None
    if ring is None:
        raise ValueError("missing ring header")
    return Ideal(ring, gens, name=name)


def load_ideal(path) -> Ideal:
    with open(path, encoding="utf-8") as fh:
        return parse_ideal(fh.read(), name=str(path))


def format_ideal(I: Ideal) -> str:
    n = I.ring.matrix_size
    if n is None:
        raise ValueError("ideal files describe matrix rings")
    lines = [f"ring n={n} field={I.ring.field}"]
    lines += [str(g) for g in I.gens]
    return "\n".join(lines) + "\n"

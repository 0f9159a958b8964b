"""Binomial ideals, exponent lattices and the primality certificate for P_2.

A binomial ideal whose exponent lattice L is saturated and which equals the
lattice ideal of L is a toric (hence prime) ideal.  Saturation of L is read
from its Smith normal form: every nonzero invariant factor must be 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .groebner import Budget, Ideal, ideal_equal, saturate
from .minors import DEFAULT_FIELD, principal_minor_ideal
from .poly import Field, Polynomial, Ring


@dataclass(frozen=True)
class IntegerLattice:
    """Sublattice of Z^dim spanned by ``rows``."""

    rows: tuple
    dim: int

    def __post_init__(self):
        if any(len(r) != self.dim for r in self.rows):
            raise ValueError("row length does not match lattice dimension")

    @property
    def rank(self) -> int:
        return len(smith_invariants(self.rows))

    def __str__(self):
        return "\n".join(" ".join(str(v) for v in r) for r in self.rows)


def binomial_exponent_lattice(I: Ideal) -> IntegerLattice:
    """One row u - v per generator x^u - x^v (unit coefficients, either sign)."""
    ring = I.ring
    f = ring.field
    rows = []
    for g in I.gens:
        items = g.items()
        if len(items) != 2:
            raise ValueError(f"not a binomial: {g}")
        (a, u), (b, v) = items
        if f.add(a, b) or f.signed(a) not in (1, -1):
            raise ValueError(f"binomial without unit coefficients: {g}")
        rows.append(tuple(x - y for x, y in zip(u, v)))
    return IntegerLattice(tuple(rows), ring.nvars)


def smith_invariants(rows) -> list:
    """Nonzero invariant factors of an integer matrix (exact, in order)."""
    A = [list(r) for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    out = []
    t = 0
    while t < min(m, n):
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        A[t], A[i] = A[i], A[t]
        for r in A:
            r[t], r[j] = r[j], r[t]
        while True:
            p = A[t][t]
            moved = False
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // p
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
                    if A[i][t]:
                        A[t], A[i] = A[i], A[t]
                        moved = True
                        break
            if moved:
                continue
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // p
                    for r in A:
                        r[j] -= q * r[t]
                    if A[t][j]:
                        for r in A:
                            r[t], r[j] = r[j], r[t]
                        moved = True
                        break
            if moved:
                continue
            # pivot must divide the rest of the block
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % p), None)
            if bad is None:
                break
            A[t] = [a + b for a, b in zip(A[t], A[bad[0]])]
        out.append(abs(A[t][t]))
        t += 1
    return out


def lattice_is_saturated(L: IntegerLattice) -> bool:
    """True iff Z^dim / L is torsion-free."""
    if not L.rows or not any(any(r) for r in L.rows):
        raise ValueError("zero lattice")
    return all(d == 1 for d in smith_invariants(L.rows))


def _binomial(ring: Ring, u) -> Polynomial:
    plus = [max(x, 0) for x in u]
    minus = [max(-x, 0) for x in u]
    return Polynomial.from_terms(ring, [(1, tuple(plus)), (-1, tuple(minus))])


def lattice_ideal(L: IntegerLattice, ring: Ring, budget: Budget | None = None) -> Ideal:
    """(x^{u+} - x^{u-} : u in basis) saturated by the product of all variables.

    Saturating by the product equals saturating by each variable in turn;
    variables absent from every binomial are nonzerodivisors and skipped.
    """
    if not L.rows or not any(any(r) for r in L.rows):
        raise ValueError("zero lattice")
    if L.dim != ring.nvars:
        raise ValueError("lattice dimension differs from the number of variables")
    J = Ideal(ring, [_binomial(ring, u) for u in L.rows if any(u)])
    used = sorted({i for u in L.rows for i, x in enumerate(u) if x})
    for v in used:
        J = saturate(J, ring.var(v), budget)
    return J


@dataclass
class ToricCertificate:
    n: int
    field: Field
    binomial: bool = False
    invariants: list = dc_field(default_factory=list)
    saturated: bool = False
    lattice_ideal_equal: bool = False
    lattice: IntegerLattice | None = None

    @property
    def ok(self) -> bool:
        return self.binomial and self.saturated and self.lattice_ideal_equal


def p2_certificate(n: int, field: Field = DEFAULT_FIELD,
                   budget: Budget | None = None) -> ToricCertificate:
    """Run the three certificate steps for P_2 of the generic n x n matrix."""
    if not 2 <= n <= 4:
        raise ValueError("certificate is run for 2 <= n <= 4")
    P2 = principal_minor_ideal(n, 2, field)
    cert = ToricCertificate(n, field)
    try:
        L = binomial_exponent_lattice(P2)
    except ValueError:
        return cert
    cert.binomial = True
    cert.lattice = L
    cert.invariants = smith_invariants(L.rows)
    cert.saturated = all(d == 1 for d in cert.invariants)
    cert.lattice_ideal_equal = ideal_equal(lattice_ideal(L, P2.ring, budget), P2, budget)
    return cert


def p2_prime_certificate(n: int, field: Field = DEFAULT_FIELD,
                         budget: Budget | None = None) -> bool:
    return p2_certificate(n, field, budget).ok


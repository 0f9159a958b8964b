"""Generic matrices, minors, adjugates and the principal-minor ideals.

Index sets are 1-based sorted tuples.  ``P(n, t)`` is generated by the size-t
principal minors of the generic n x n matrix, ``I(n, t)`` by all size-t
minors, and ``q_ideal(n)`` is ``P(n, n-1) : det^infinity``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations

from .groebner import Budget, BudgetExceeded, Ideal, minimal_generators, saturate
from .poly import DEFAULT_PRIME, Field, Polynomial, QQ, Ring, _minor, det

DEFAULT_FIELD = Field(DEFAULT_PRIME)


@lru_cache(maxsize=None)
def matrix_ring(n: int, field: Field = DEFAULT_FIELD) -> Ring:
    return Ring.matrix(n, field)


def generic_matrix(ring: Ring):
    return ring.generic_matrix()


def _check_indices(M, rows, cols):
    n = len(M)
    if len(rows) != len(cols):
        raise ValueError("row and column sets differ in size")
    for s in (rows, cols):
        if any(not 1 <= i <= n for i in s):
            raise IndexError(f"index set {s} out of range for n={n}")
        if list(s) != sorted(set(s)):
            raise ValueError(f"index set {s} must be strictly increasing")


def _one_of(M):
    a = M[0][0] if M and M[0] else 1
    return a.ring.one if isinstance(a, Polynomial) else 1


def minor(M, rows, cols, memo=None):
    """Determinant of the submatrix on ``rows`` x ``cols`` (1-based)."""
    rows, cols = tuple(rows), tuple(cols)
    _check_indices(M, rows, cols)
    return _minor(M, tuple(i - 1 for i in rows), tuple(j - 1 for j in cols),
                  {} if memo is None else memo, _one_of(M))


def complement(s, n):
    return tuple(i for i in range(1, n + 1) if i not in s)


def cofactor(M, rows, cols, memo=None):
    """(-1)^(sum rows + sum cols) times the complementary minor."""
    rows, cols = tuple(rows), tuple(cols)
    _check_indices(M, rows, cols)
    n = len(M)
    m = minor(M, complement(rows, n), complement(cols, n), memo) if len(rows) < n else _one_of(M)
    return -m if (sum(rows) + sum(cols)) % 2 else m


def adjugate(M):
    """Transpose of the cofactor matrix."""
    n = len(M)
    memo = {}
    cof = [[cofactor(M, (i,), (j,), memo) for j in range(1, n + 1)] for i in range(1, n + 1)]
    return [[cof[j][i] for j in range(n)] for i in range(n)]


def all_minors(M, t):
    """Every size-t minor, keyed by (rows, cols), sharing one memo."""
    n = len(M)
    memo = {}
    idx = list(combinations(range(1, n + 1), t))
    return {(r, c): minor(M, r, c, memo) for r in idx for c in idx}


def principal_minors(M, t):
    n = len(M)
    memo = {}
    return {s: minor(M, s, s, memo) for s in combinations(range(1, n + 1), t)}


def determinant(ring: Ring) -> Polynomial:
    return det(ring.generic_matrix(), ring.one)


# ---------------------------------------------------------------------------
# ideals


def _ring(n, field, ring):
    if ring is not None:
        if ring.matrix_size != n or ring.nvars != n * n:
            raise ValueError("ring does not match n")
        return ring
    return matrix_ring(n, field)


def principal_minor_ideal(n: int, t: int, field: Field = DEFAULT_FIELD, ring=None) -> Ideal:
    """P_t: the C(n,t) principal t-minors, in lexicographic subset order."""
    if not 1 <= t <= n:
        raise ValueError(f"t={t} out of range for n={n}")
    ring = _ring(n, field, ring)
    gens = list(principal_minors(ring.generic_matrix(), t).values())
    return Ideal(ring, gens, name=f"P{t}(X{n})")


def determinantal_ideal(n: int, t: int, field: Field = DEFAULT_FIELD, ring=None) -> Ideal:
    """I_t: all C(n,t)^2 size-t minors."""
    if not 1 <= t <= n:
        raise ValueError(f"t={t} out of range for n={n}")
    ring = _ring(n, field, ring)
    gens = list(all_minors(ring.generic_matrix(), t).values())
    return Ideal(ring, gens, name=f"I{t}(X{n})")


def P(n, t, field=DEFAULT_FIELD):
    return principal_minor_ideal(n, t, field)


def I(n, t, field=DEFAULT_FIELD):
    return determinantal_ideal(n, t, field)


def q_ideal(n: int, field: Field = DEFAULT_FIELD, budget: Budget | None = None,
            max_n: int = 4) -> Ideal:
    """Q_{n-1} = P_{n-1} : det^infinity, minimally generated.

    The reduced Groebner basis from the saturation is kept in the cache.
    """
    if n < 2:
        raise ValueError("q_ideal needs n >= 2")
    if n > max_n:
        raise BudgetExceeded("matrix size", max_n)
    Pn = principal_minor_ideal(n, n - 1, field)
    S = saturate(Pn, determinant(Pn.ring), budget)
    Q = Ideal(Pn.ring, minimal_generators(S, budget), name=f"Q{n - 1}(X{n})")
    Q.seed(S.groebner())
    return Q


# the six signed quartic terms of f, as (sign, [(i, j), ...])
F_TERMS = (
    (-1, [(1, 4), (2, 1), (3, 3), (4, 2)]),
    (+1, [(1, 1), (2, 3), (3, 4), (4, 2)]),
    (+1, [(1, 4), (2, 2), (3, 1), (4, 3)]),
    (-1, [(1, 1), (2, 2), (3, 4), (4, 3)]),
    (-1, [(1, 2), (2, 3), (3, 1), (4, 4)]),
    (+1, [(1, 2), (2, 1), (3, 3), (4, 4)]),
)


def f_polynomial(ring: Ring | None = None, field: Field = DEFAULT_FIELD) -> Polynomial:
    """The quartic generating Q_3 modulo P_3 for 4 x 4 matrices."""
    ring = ring or matrix_ring(4, field)
    if ring.matrix_size != 4:
        raise ValueError("f lives in the 4 x 4 matrix ring")
    out = ring.zero
    for sign, entries in F_TERMS:
        term = ring.const(sign)
        for i, j in entries:
            term = term * ring.x(i, j)
        out = out + term
    return out


# ---------------------------------------------------------------------------
# symbolic identities


def muir_failures(n: int, t: int, max_n: int = 4, transpose: bool = True):
    """Index pairs where the adjugate-minor identity fails, over Z.

    The (rows; cols) minor of Adj X is compared with det^(t-1) times the
    cofactor of X at (cols; rows).  Adj X is the transpose of the cofactor
    matrix, so the cofactor indices swap; ``transpose=False`` tests the
    unswapped pairing, which already fails at t = 1 for n >= 2.
    """
    if not 1 <= t <= n:
        raise ValueError("need 1 <= t <= n")
    if n > max_n:
        raise BudgetExceeded("matrix size", max_n)
    ring = matrix_ring(n, QQ)
    X = ring.generic_matrix()
    A = adjugate(X)
    D = det(X, ring.one)
    Dp = D ** (t - 1)
    memo_a, memo_x = {}, {}
    bad = []
    for rows in combinations(range(1, n + 1), t):
        for cols in combinations(range(1, n + 1), t):
            lhs = minor(A, rows, cols, memo_a)
            rhs = Dp * (cofactor(X, cols, rows, memo_x) if transpose
                        else cofactor(X, rows, cols, memo_x))
            if lhs != rhs:
                bad.append((rows, cols, lhs - rhs))
    return bad


def muir_verify(n: int, t: int) -> bool:
    return not muir_failures(n, t)


def duality_failures(n: int, t: int, max_n: int = 4):
    """Principal S where minor(Adj X; S, S) != det^(t-1) * mu_{S^c}(X)."""
    if not 1 <= t < n:
        raise ValueError("need 1 <= t < n")
    if n > max_n:
        raise BudgetExceeded("matrix size", max_n)
    ring = matrix_ring(n, QQ)
    X = ring.generic_matrix()
    A = adjugate(X)
    D = det(X, ring.one)
    Dp = D ** (t - 1)
    memo_a, memo_x = {}, {}
    targets = set(principal_minors(X, n - t).values())
    bad = []
    images = set()
    for s in combinations(range(1, n + 1), t):
        comp = complement(s, n)
        mu = minor(X, comp, comp, memo_x)
        lhs = minor(A, s, s, memo_a)
        if lhs != Dp * mu:
            bad.append((s, lhs - Dp * mu))
        images.add(mu)
    if images != targets:
        bad.append(("image", None))
    return bad


def inversion_duality_verify(n: int, t: int) -> bool:
    return not duality_failures(n, t)


# ---------------------------------------------------------------------------
# witness matrices

HOLLOW4 = ((0, 0, 0, 1),
           (1, 1, 1, 0),
           (0, 1, 1, 0),
           (0, 0, 1, 0))


@dataclass(frozen=True)
class PermutationWitness:
    perm: tuple
    matrix: tuple
    derangement: bool


def permutation_witness(perm) -> PermutationWitness:
    """0/1 matrix with a one at (i, perm(i)); ``perm`` is 1-based images."""
    perm = tuple(perm)
    n = len(perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"{perm} is not a permutation of 1..{n}")
    M = tuple(tuple(1 if perm[i] == j + 1 else 0 for j in range(n)) for i in range(n))
    return PermutationWitness(perm, M, all(perm[i] != i + 1 for i in range(n)))


def derangements(n: int):
    return [p for p in permutations(range(1, n + 1)) if all(p[i] != i + 1 for i in range(n))]


def cycle(n: int):
    """The n-cycle 1 -> 2 -> ... -> n -> 1."""
    return tuple(list(range(2, n + 1)) + [1])


def parse_matrix(text: str):
    """Integer grid: rows separated by ';' or newlines, entries by whitespace/commas."""
    rows = [r for r in (s.strip() for s in text.replace("\n", ";").split(";")) if r]
    M = [[int(x) for x in r.replace(",", " ").split()] for r in rows]
    if not M or any(len(r) != len(M) for r in M):
        raise ValueError("matrix literal must be square")
    return M


def conjugate(f: Polynomial, perm) -> Polynomial:
    """Image of f under X -> T X T^t for the permutation T (1-based images)."""
    ring = f.ring
    n = ring.matrix_size
    mapping = list(range(ring.nvars))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            mapping[ring.x_index(i, j)] = ring.x_index(perm[i - 1], perm[j - 1])
    return f.permute_variables(mapping)


def rank_mod(M, p: int) -> int:
    """Rank of an integer matrix over F_p (p = 0: over Q)."""
    from fractions import Fraction

    A = [[Fraction(x) if not p else x % p for x in r] for r in M]
    rows, cols = len(A), len(A[0]) if A else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p) if p else 1 / A[r][c]
        for i in range(rows):
            if i != r and A[i][c]:
                fac = A[i][c] * inv
                A[i] = [(a - fac * b) % p if p else a - fac * b for a, b in zip(A[i], A[r])]
        r += 1
    return r

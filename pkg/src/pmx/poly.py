"""Exact sparse polynomials in the entries of a generic matrix.

Coefficients live in Q (Python ints / Fractions) or a prime field F_p (ints
in [0, p)).  Monomials are packed into Python ints, one 17-bit field per
variable (16 value bits plus a guard bit), first variable most significant.
With that packing monomial multiplication is integer addition and integer
comparison is lex order.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations

BITS = 17
VALUE_MASK = (1 << (BITS - 1)) - 1
MAX_EXP = VALUE_MASK

DEFAULT_PRIME = 32003


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class Field:
    """Coefficient field: the rationals (``p == 0``) or F_p."""

    __slots__ = ("p",)

    def __init__(self, p: int = 0):
        if p and not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    @classmethod
    def parse(cls, text: str) -> "Field":
        text = text.strip()
        if text in ("Q", "QQ"):
            return cls(0)
        m = re.fullmatch(r"(?:Fp|GF|F):?(\d+)", text)
        if not m:
            raise ValueError(f"bad field spec {text!r}; expected Q or Fp:<p>")
        return cls(int(m.group(1)))

    def __repr__(self):
        return "Q" if not self.p else f"Fp:{self.p}"

    __str__ = __repr__

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    @property
    def characteristic(self) -> int:
        return self.p

    def __call__(self, c):
        """Coerce an int or Fraction into a normalized scalar."""
        p = self.p
        if p:
            if isinstance(c, Fraction):
                return c.numerator * pow(c.denominator, -1, p) % p
            return int(c) % p
        if isinstance(c, Fraction):
            return c.numerator if c.denominator == 1 else c
        if isinstance(c, int):
            return c
        raise TypeError(f"cannot coerce {c!r} into {self}")

    def inv(self, c):
        if not c:
            raise ZeroDivisionError("inverse of zero")
        if self.p:
            return pow(c, -1, self.p)
        return self(Fraction(1) / c)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p else a - b

    def mul(self, a, b):
        return a * b % self.p if self.p else self(a * b)

    def neg(self, a):
        return -a % self.p if self.p else -a

    def signed(self, c):
        """Symmetric representative of an F_p element, for printing."""
        if self.p and c > self.p // 2:
            return c - self.p
        return c


QQ = Field(0)


def pack(exps) -> int:
    m = 0
    for e in exps:
        if e < 0 or e > MAX_EXP:
            raise OverflowError(f"exponent {e} outside [0, {MAX_EXP}]")
        m = (m << BITS) | e
    return m


def unpack(m: int, nvars: int) -> tuple:
    out = [0] * nvars
    for i in range(nvars - 1, -1, -1):
        out[i] = m & VALUE_MASK
        m >>= BITS
    return tuple(out)


def _guard(nfields: int) -> int:
    g = 0
    for _ in range(nfields):
        g = (g << BITS) | (1 << (BITS - 1))
    return g


class Ring:
    """Polynomial ring over ``field`` with named variables.

    ``matrix_size`` is set for K[X] with X generic n x n; variables are then
    ``x[i,j]`` in row-major order.  Extending a matrix ring with auxiliary
    variables keeps ``matrix_size`` so matrix-indexed helpers still apply.
    """

    __slots__ = ("names", "field", "matrix_size", "_index", "__dict__")

    def __init__(self, names, field: Field = QQ, matrix_size: int | None = None):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        self.field = field
        self.matrix_size = matrix_size
        self._index = {nm: i for i, nm in enumerate(self.names)}

    @classmethod
    def matrix(cls, n: int, field: Field = QQ) -> "Ring":
        if n < 1:
            raise ValueError("matrix size must be >= 1")
        names = [f"x[{i},{j}]" for i in range(1, n + 1) for j in range(1, n + 1)]
        return cls(names, field, matrix_size=n)

    @property
    def nvars(self) -> int:
        return len(self.names)

    def __repr__(self):
        return f"Ring({len(self.names)} vars, {self.field})"

    def __eq__(self, other):
        return (isinstance(other, Ring) and other.names == self.names
                and other.field == self.field)

    def __hash__(self):
        return hash((self.names, self.field))

    def with_field(self, field: Field) -> "Ring":
        return Ring(self.names, field, self.matrix_size)

    def extend(self, names) -> "Ring":
        return Ring(self.names + tuple(names), self.field, self.matrix_size)

    def index(self, name) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"unknown variable {name!r}") from None

    def x_index(self, i: int, j: int) -> int:
        n = self.matrix_size
        if n is None:
            raise ValueError("not a matrix ring")
        if not (1 <= i <= n and 1 <= j <= n):
            raise IndexError(f"x[{i},{j}] out of range for n={n}")
        return (i - 1) * n + (j - 1)

    def var(self, name) -> "Polynomial":
        i = name if isinstance(name, int) else self.index(name)
        if not 0 <= i < self.nvars:
            raise IndexError(i)
        return Polynomial(self, {1 << (BITS * (self.nvars - 1 - i)): 1})

    def x(self, i: int, j: int) -> "Polynomial":
        return self.var(self.x_index(i, j))

    def gens(self):
        return [self.var(i) for i in range(self.nvars)]

    def generic_matrix(self):
        n = self.matrix_size
        return [[self.x(i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]

    @property
    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    @property
    def one(self) -> "Polynomial":
        return Polynomial(self, {0: 1})

    def const(self, c) -> "Polynomial":
        c = self.field(c)
        return Polynomial(self, {0: c} if c else {})

    @cached_property
    def guard(self) -> int:
        return _guard(self.nvars)

    @cached_property
    def grevlex(self) -> "Packing":
        return Packing(TermOrder.grevlex(), self.nvars)

    def parse(self, text: str) -> "Polynomial":
        return _Parser(self, text).parse()


# ---------------------------------------------------------------------------
# term orders


@dataclass(frozen=True)
class TermOrder:
    """lex, grevlex, or a block (elimination) order.

    A block order ranks monomials first by their restriction to
    ``eliminate`` and then by the restriction to the remaining variables,
    both compared with ``inner``.
    """

    kind: str = "grevlex"
    eliminate: frozenset = frozenset()
    inner: str = "grevlex"

    def __post_init__(self):
        if self.kind not in ("lex", "grevlex", "block"):
            raise ValueError(f"unknown order {self.kind!r}")
        if self.inner not in ("lex", "grevlex"):
            raise ValueError(f"unknown inner order {self.inner!r}")

    @classmethod
    def grevlex(cls):
        return cls("grevlex")

    @classmethod
    def lex(cls):
        return cls("lex")

    @classmethod
    def block(cls, eliminate, inner="grevlex"):
        return cls("block", frozenset(eliminate), inner)

    @classmethod
    def parse(cls, text: str) -> "TermOrder":
        if text not in ("lex", "grevlex"):
            raise ValueError(f"order must be lex or grevlex, got {text!r}")
        return cls(text)

    def __str__(self):
        if self.kind != "block":
            return self.kind
        return f"block({sorted(self.eliminate)};{self.inner})"


def _order_rows(order: TermOrder, nvars: int):
    """Rows of a 0/1 weight matrix realizing ``order`` (lex tie-break after)."""

    def grevlex_rows(vs):
        # prefix sums e_1+..+e_k for k = len, len-1, ..., 1; first row is degree
        return [list(vs[:k]) for k in range(len(vs), 0, -1)]

    if order.kind == "lex":
        return []
    if order.kind == "grevlex":
        return grevlex_rows(list(range(nvars)))
    elim = sorted(v for v in order.eliminate if 0 <= v < nvars)
    if len(elim) != len(order.eliminate):
        raise ValueError("eliminated variable out of range")
    rest = [v for v in range(nvars) if v not in order.eliminate]
    rows = []
    for block in (elim, rest):
        if not block:
            continue
        if order.inner == "grevlex":
            rows += grevlex_rows(block)
        else:
            rows += [[v] for v in block]
    return rows


class Packing:
    """Order-aware monomial encoding used by the Groebner engine.

    Fields, most significant first: one per weight row (a sum of exponents),
    then the exponents themselves, then the total degree.  Every field is a
    non-negative linear function of the exponent vector, so

    * multiplication is integer addition,
    * integer comparison is the term order,
    * ``a | b`` iff no field of ``b - a`` borrows (single guard-bit test).
    """

    def __init__(self, order: TermOrder, nvars: int):
        self.order = order
        self.nvars = nvars
        self.rows = _order_rows(order, nvars)
        self.nfields = len(self.rows) + nvars + 1
        self.guard = _guard(self.nfields)
        self.emask = (1 << (BITS * nvars)) - 1

    def encode(self, exps) -> int:
        m = 0
        for row in self.rows:
            s = 0
            for v in row:
                s += exps[v]
            m = (m << BITS) | s
        deg = 0
        for e in exps:
            m = (m << BITS) | e
            deg += e
        if deg > MAX_EXP:
            raise OverflowError(f"total degree {deg} exceeds {MAX_EXP}")
        return (m << BITS) | deg

    def from_epack(self, e: int) -> int:
        return self.encode(unpack(e, self.nvars))

    def to_epack(self, m: int) -> int:
        return (m >> BITS) & self.emask

    def decode(self, m: int) -> tuple:
        return unpack((m >> BITS) & self.emask, self.nvars)

    @staticmethod
    def degree(m: int) -> int:
        return m & VALUE_MASK

    def divides(self, a: int, b: int) -> bool:
        g = self.guard
        return ((b | g) - a) & g == g

    def lcm(self, a: int, b: int) -> int:
        ea, eb = self.decode(a), self.decode(b)
        return self.encode([x if x > y else y for x, y in zip(ea, eb)])

    def support(self, m: int) -> int:
        """Bitmask of variables occurring in ``m``."""
        s = 0
        for i, e in enumerate(self.decode(m)):
            if e:
                s |= 1 << i
        return s


def cmp_monomials(a, b, order: TermOrder) -> int:
    """Compare exponent vectors: -1, 0 or 1."""
    if len(a) != len(b):
        raise ValueError("exponent vectors of different length")
    pk = Packing(order, len(a))
    x, y = pk.encode(a), pk.encode(b)
    return (x > y) - (x < y)


# ---------------------------------------------------------------------------
# polynomials


class Polynomial:
    """Immutable sparse polynomial: dict of packed monomial -> coefficient."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    @classmethod
    def from_terms(cls, ring: Ring, items) -> "Polynomial":
        """Build from (coefficient, exponent tuple) pairs, combining duplicates."""
        f = ring.field
        d = {}
        for c, exps in items:
            if len(exps) != ring.nvars:
                raise ValueError("exponent vector length mismatch")
            k = pack(exps)
            d[k] = d.get(k, 0) + c
        out = {}
        for k, c in d.items():
            c = f(c)
            if c:
                out[k] = c
        return cls(ring, out)

    # -- basic queries
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def items(self):
        """(coefficient, exponent tuple) pairs, canonical (grevlex) order."""
        nv = self.ring.nvars
        return [(self.terms[k], unpack(k, nv)) for k in self._sorted_keys()]

    def _sorted_keys(self, order: TermOrder | None = None):
        pk = self.ring.grevlex if order is None else Packing(order, self.ring.nvars)
        return sorted(self.terms, key=pk.from_epack, reverse=True)

    def leading(self, order: TermOrder | None = None):
        """(coefficient, exponent tuple) of the leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        k = self._sorted_keys(order)[0]
        return self.terms[k], unpack(k, self.ring.nvars)

    @property
    def total_degree(self) -> int:
        if not self.terms:
            return -1
        nv = self.ring.nvars
        return max(sum(unpack(k, nv)) for k in self.terms)

    def is_homogeneous(self) -> bool:
        nv = self.ring.nvars
        return len({sum(unpack(k, nv)) for k in self.terms}) <= 1

    def variables(self) -> set:
        """Indices of variables occurring in the polynomial."""
        nv = self.ring.nvars
        out = set()
        for k in self.terms:
            for i, e in enumerate(unpack(k, nv)):
                if e:
                    out.add(i)
        return out

    def degree_in(self, var: int) -> int:
        shift = BITS * (self.ring.nvars - 1 - var)
        return max(((k >> shift) & VALUE_MASK for k in self.terms), default=-1)

    def constant(self):
        return self.terms.get(0, 0)

    # -- arithmetic
    def _check(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise ValueError("ring mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.ring.field.p
        d = dict(self.terms)
        for k, c in other.terms.items():
            v = d.get(k, 0) + c
            if p:
                v %= p
            if v:
                d[k] = v
            else:
                d.pop(k, None)
        return Polynomial(self.ring, d)

    __radd__ = __add__

    def __neg__(self):
        f = self.ring.field
        return Polynomial(self.ring, {k: f.neg(c) for k, c in self.terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        ring = self.ring
        p = ring.field.p
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        d = {}
        get = d.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                d[k] = get(k, 0) + ca * cb
        g = ring.guard
        out = {}
        for k, c in d.items():
            if p:
                c %= p
            elif isinstance(c, Fraction) and c.denominator == 1:
                c = c.numerator
            if c:
                if k & g:
                    raise OverflowError("exponent overflow in product")
                out[k] = c
        return Polynomial(ring, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a non-negative int")
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scale(self, c) -> "Polynomial":
        f = self.ring.field
        c = f(c)
        if not c:
            return self.ring.zero
        return Polynomial(self.ring, {k: f.mul(v, c) for k, v in self.terms.items()})

    def monic(self, order: TermOrder | None = None) -> "Polynomial":
        if not self.terms:
            return self
        lc, _ = self.leading(order)
        return self.scale(self.ring.field.inv(lc))

    def shift(self, exps) -> "Polynomial":
        """Multiply by the monomial with exponent vector ``exps``."""
        s = pack(exps)
        g = self.ring.guard
        out = {}
        for k, c in self.terms.items():
            k += s
            if k & g:
                raise OverflowError("exponent overflow in product")
            out[k] = c
        return Polynomial(self.ring, out)

    # -- equality / hashing
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # -- ring changes
    def embed(self, ring: Ring) -> "Polynomial":
        """Map into ``ring``, whose variable list starts with ours."""
        if ring.names[: self.ring.nvars] != self.ring.names:
            raise ValueError("target ring does not extend the source ring")
        extra = BITS * (ring.nvars - self.ring.nvars)
        f = ring.field
        out = {}
        for k, c in self.terms.items():
            c = f(c) if f != self.ring.field else c
            if c:
                out[k << extra] = c
        return Polynomial(ring, out)

    def restrict(self, ring: Ring) -> "Polynomial":
        """Inverse of :meth:`embed`; the dropped variables must not occur."""
        n0 = ring.nvars
        if self.ring.names[:n0] != ring.names:
            raise ValueError("source ring does not extend the target ring")
        extra = BITS * (self.ring.nvars - n0)
        low = (1 << extra) - 1
        out = {}
        for k, c in self.terms.items():
            if k & low:
                raise ValueError("polynomial involves eliminated variables")
            out[k >> extra] = c
        return Polynomial(ring, out)

    def change_field(self, field: Field) -> "Polynomial":
        ring = self.ring.with_field(field)
        out = {}
        for k, c in self.terms.items():
            c = field(c)
            if c:
                out[k] = c
        return Polynomial(ring, out)

    def permute_variables(self, perm) -> "Polynomial":
        """Rename variable ``i`` to ``perm[i]``."""
        nv = self.ring.nvars
        out = {}
        for k, c in self.terms.items():
            e = unpack(k, nv)
            new = [0] * nv
            for i, x in enumerate(e):
                new[perm[i]] = x
            out[pack(new)] = c
        return Polynomial(self.ring, out)

    def diff(self, var: int) -> "Polynomial":
        """Partial derivative in variable ``var``."""
        f = self.ring.field
        shift = BITS * (self.ring.nvars - 1 - var)
        out = {}
        for k, c in self.terms.items():
            e = (k >> shift) & VALUE_MASK
            if e:
                v = f.mul(c, f(e))
                if v:
                    out[k - (1 << shift)] = v
        return Polynomial(self.ring, out)

    # -- printing
    def __str__(self):
        if not self.terms:
            return "0"
        f = self.ring.field
        names = self.ring.names
        parts = []
        for c, exps in self.items():
            c = f.signed(c)
            mono = "*".join(
                names[i] if e == 1 else f"{names[i]}^{e}"
                for i, e in enumerate(exps) if e)
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"Polynomial({self})"


# ---------------------------------------------------------------------------
# evaluation, determinants, multigrading


def evaluate(f: Polynomial, point):
    """Exact value of ``f`` at ``point``.

    ``point`` maps variable index (or name) to a scalar; for matrix rings it
    may also be an n x n grid of scalars.
    """
    ring = f.ring
    field = ring.field
    vals = _point_values(ring, point)
    nv = ring.nvars
    total = 0
    for k, c in f.terms.items():
        term = c
        for i, e in enumerate(unpack(k, nv)):
            if e:
                v = vals[i]
                if v is None:
                    raise ValueError(f"variable {ring.names[i]} is unassigned")
                term = field.mul(term, field(v) ** e if not field.p else pow(field(v), e, field.p))
        total = field.add(total, term)
    return field(total)


def _point_values(ring: Ring, point):
    vals = [None] * ring.nvars
    if isinstance(point, dict):
        for key, v in point.items():
            vals[key if isinstance(key, int) else ring.index(key)] = v
        return vals
    n = ring.matrix_size
    if n is None or len(point) != n or any(len(r) != n for r in point):
        raise ValueError("point must be a dict or an n x n grid")
    for i in range(n):
        for j in range(n):
            vals[i * n + j] = point[i][j]
    return vals


def det(M, one=1):
    """Determinant by row expansion with memoization over column subsets.

    Works for any commutative ring whose elements support ``+ - *``;
    ``one`` is the multiplicative identity (used for the empty minor).
    """
    n = len(M)
    if any(len(r) != n for r in M):
        raise ValueError("matrix is not square")
    if n == 0:
        return one
    return _minor(M, tuple(range(n)), tuple(range(n)), {}, one)


def _minor(M, rows, cols, memo, one):
    # expand along the first row; memo keyed by (rows, cols) tuples
    if not rows:
        return one
    key = (rows, cols)
    if key in memo:
        return memo[key]
    r0, rest = rows[0], rows[1:]
    total = None
    for pos, c in enumerate(cols):
        a = M[r0][c]
        if _is_zero(a):
            continue
        sub = _minor(M, rest, cols[:pos] + cols[pos + 1:], memo, one)
        if _is_zero(sub):
            continue
        term = a * sub
        if pos % 2:
            total = -term if total is None else total - term
        else:
            total = term if total is None else total + term
    if total is None:
        total = one - one
    memo[key] = total
    return total


def _is_zero(a):
    return (not a) if isinstance(a, Polynomial) else a == 0


def leibniz_det(M, one=1):
    """Reference determinant: sum over permutations (slow, for checking)."""
    from itertools import permutations

    n = len(M)
    total = one - one
    for perm in permutations(range(n)):
        sign = 1
        seen = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if seen[i] > seen[j]:
                    sign = -sign
        term = one
        for i in range(n):
            term = term * M[i][perm[i]]
        total = total + term if sign > 0 else total - term
    return total


@dataclass(frozen=True)
class Multidegree:
    rows: tuple
    cols: tuple

    @property
    def total(self) -> int:
        return sum(self.rows)

    def __str__(self):
        return f"({','.join(map(str, self.rows))};{','.join(map(str, self.cols))})"


def multidegree(f: Polynomial) -> Multidegree | None:
    """Row/column degree vector, or None if ``f`` is not multihomogeneous."""
    if not f.terms:
        raise ValueError("zero polynomial has no multidegree")
    ring = f.ring
    n = ring.matrix_size
    if n is None:
        raise ValueError("multigrading needs a matrix ring")
    if ring.nvars != n * n:
        extra = f.variables() - set(range(n * n))
        if extra:
            raise ValueError("polynomial involves non-matrix variables")
    found = None
    for k in f.terms:
        e = unpack(k, ring.nvars)
        rows = tuple(sum(e[i * n:(i + 1) * n]) for i in range(n))
        cols = tuple(sum(e[i * n + j] for i in range(n)) for j in range(n))
        if found is None:
            found = (rows, cols)
        elif found != (rows, cols):
            return None
    return Multidegree(*found)


def subsets(n: int, t: int):
    """Size-t subsets of {1..n} as sorted tuples, lexicographically."""
    return list(combinations(range(1, n + 1), t))


# ---------------------------------------------------------------------------
# parser


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*(?:\[[^\]]*\])?)|(.))")


class _Parser:
    """Recursive descent over ``+ - * / ^`` and parentheses."""

    def __init__(self, ring: Ring, text: str):
        self.ring = ring
        self.toks = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                break
            num, name, op = m.groups()
            if num is not None:
                self.toks.append(("num", int(num)))
            elif name is not None:
                self.toks.append(("var", re.sub(r"\s+", "", name)))
            elif op.strip():
                if op not in "+-*/^()":
                    raise ValueError(f"unexpected character {op!r}")
                self.toks.append(("op", op))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        if not self.toks:
            raise ValueError("empty polynomial")
        out = self.expr()
        if self.i != len(self.toks):
            raise ValueError(f"trailing input at token {self.peek()[1]!r}")
        return out

    def expr(self):
        acc = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                acc = acc * rhs
            else:
                if set(rhs.terms) - {0} or not rhs.terms:
                    raise ValueError("division only by a nonzero constant")
                acc = acc.scale(self.ring.field.inv(rhs.terms[0]))
        return acc

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ValueError("exponent must be a non-negative integer")
            return base ** val
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return self.ring.const(val)
        if kind == "var":
            return self.ring.var(val)
        if (kind, val) == ("op", "("):
            out = self.expr()
            if self.take() != ("op", ")"):
                raise ValueError("unbalanced parentheses")
            return out
        raise ValueError(f"unexpected token {val!r}")

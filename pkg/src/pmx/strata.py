"""Finite-field sampling of the rank strata Y_{n,r,t} inside V(P_t).

Matrices are drawn uniformly over F_q (or uniformly among rank-r matrices via
an n x r times r x n factorization).  Generators are compiled to vectorized
numpy evaluators, so the hot loop never touches polynomial objects.

Two estimators are provided.  ``count`` is plain hit counting.  ``fiber``
draws every entry except one variable v in which all generators and det are
affine, and counts the admissible values of v exactly; the mean of
count/q is an unbiased estimate of the same frequency with far less variance
when the stratum is thin.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from .groebner import BudgetExceeded, Ideal
from .minors import determinant, principal_minor_ideal
from .poly import Field, Polynomial

CENSUS_LIMIT = 1 << 24
Z95 = 1.959963984540054


@dataclass(frozen=True)
class SampleConfig:
    """Sampling parameters.  ``rank`` and ``invertible`` are optional constraints."""

    n: int
    t: int
    q: int
    samples: int = 10**6
    rank: int | None = None
    invertible: bool = False
    seed: int = 0
    chunk: int = 1 << 20
    workers: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if not 1 <= self.t <= self.n:
            raise ValueError(f"t={self.t} out of range for n={self.n}")
        Field(self.q)  # primality check
        if self.q < 2 or self.q >= 1 << 31:
            raise ValueError("q must be a prime below 2^31")
        if self.samples < 1:
            raise ValueError("need at least one sample")
        if self.rank is not None and not 0 <= self.rank <= self.n:
            raise ValueError("rank constraint must satisfy 0 <= r <= n")
        if self.invertible and self.rank is not None and self.rank < self.n:
            raise ValueError("invertible matrices have rank n")
        if self.chunk < 1 or self.workers < 1:
            raise ValueError("chunk and workers must be positive")

    @property
    def stratum_rank(self) -> int | None:
        return self.n if self.invertible else self.rank


class SamplingError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# modular linear algebra on batches; arrays are (n*n, m), row-major entries


def powmod(a, e: int, q: int):
    a = np.asarray(a, dtype=np.int64) % q
    out = np.ones_like(a)
    while e:
        if e & 1:
            out = out * a % q
        a = a * a % q
        e >>= 1
    return out


def batch_rank(entries, n: int, q: int):
    """Rank over F_q of each column of an (n*n, m) array of matrix entries."""
    A = np.array(entries, dtype=np.int64).reshape(n, n, -1) % q
    m = A.shape[2]
    cols = np.arange(m)
    rank = np.zeros(m, dtype=np.int64)
    for c in range(n):
        # pivot: first row >= rank with a nonzero entry in column c
        rows = np.arange(n)[:, None]
        cand = (A[:, c, :] != 0) & (rows >= rank[None, :])
        has = cand.any(axis=0)
        piv = np.argmax(cand, axis=0)
        if not has.any():
            continue
        idx = cols[has]
        r, p = rank[has], piv[has]
        top, prow = A[r, :, idx].copy(), A[p, :, idx].copy()
        A[r, :, idx], A[p, :, idx] = prow, top
        inv = powmod(A[r, c, idx], q - 2, q)
        A[r, :, idx] = A[r, :, idx] * inv[:, None] % q
        for i in range(n):
            sel = i != r
            if not sel.any():
                continue
            j, ri = idx[sel], r[sel]
            fac = A[i, c, j]
            A[i, :, j] = (A[i, :, j] - fac[:, None] * A[ri, :, j]) % q
        rank[has] += 1
    return rank


def _mat_product(a, b, n: int, r: int, q: int):
    """(n*r, m) times (r*n, m) -> (n*n, m), all mod q."""
    a = a.reshape(n, r, -1)
    b = b.reshape(r, n, -1)
    out = np.zeros((n, n, a.shape[2]), dtype=np.int64)
    for k in range(r):
        out = (out + a[:, k, None, :] * b[None, k, :, :]) % q
    return out.reshape(n * n, -1)


def _draw(rng, cfg: SampleConfig, m: int, max_rounds: int = 200):
    n, q, r = cfg.n, cfg.q, cfg.rank
    if r is None:
        return rng.integers(0, q, size=(n * n, m), dtype=np.int64)
    if r == 0:
        return np.zeros((n * n, m), dtype=np.int64)
    a = rng.integers(0, q, size=(n * r, m), dtype=np.int64)
    b = rng.integers(0, q, size=(r * n, m), dtype=np.int64)
    for _ in range(max_rounds):
        bad = (batch_rank_rect(a, n, r, q) < r) | (batch_rank_rect(b, r, n, q) < r)
        k = int(bad.sum())
        if not k:
            return _mat_product(a, b, n, r, q)
        a[:, bad] = rng.integers(0, q, size=(n * r, k), dtype=np.int64)
        b[:, bad] = rng.integers(0, q, size=(r * n, k), dtype=np.int64)
    raise SamplingError(f"rank-{r} factors not found after {max_rounds} rounds")


def batch_rank_rect(entries, rows: int, cols: int, q: int):
    """Rank of rows x cols matrices, by padding to a square."""
    s = max(rows, cols)
    m = entries.shape[1]
    pad = np.zeros((s, s, m), dtype=np.int64)
    pad[:rows, :cols, :] = entries.reshape(rows, cols, m)
    return batch_rank(pad.reshape(s * s, m), s, q)


def _streams(cfg: SampleConfig):
    """(size, Generator) per chunk; fixed by (seed, samples, chunk) only."""
    sizes = [cfg.chunk] * (cfg.samples // cfg.chunk)
    if cfg.samples % cfg.chunk:
        sizes.append(cfg.samples % cfg.chunk)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))
    return [(m, np.random.Generator(np.random.Philox(s))) for m, s in zip(sizes, seeds)]


def sample_matrices(cfg: SampleConfig, count: int | None = None):
    """All (or the first ``count``) samples as an (n*n, m) array."""
    if count is not None:
        cfg = SampleConfig(**{**asdict(cfg), "samples": count})
    return np.concatenate([_draw(rng, cfg, m) for m, rng in _streams(cfg)], axis=1)


def sample_matrix(cfg: SampleConfig):
    """One sample as a nested list; rank/invertibility constraints honoured."""
    if cfg.invertible and cfg.rank is None:
        cfg = SampleConfig(**{**asdict(cfg), "rank": cfg.n})
    col = sample_matrices(cfg, 1)[:, 0]
    return [[int(col[i * cfg.n + j]) for j in range(cfg.n)] for i in range(cfg.n)]


# ---------------------------------------------------------------------------
# compiled evaluation


def _coeff_mod(c, q: int) -> int:
    num = getattr(c, "numerator", c)
    den = getattr(c, "denominator", 1)
    return int(num) * pow(int(den), -1, q) % q


class CompiledPoly:
    """Vectorized evaluator of a polynomial mod q at columns of an entry array."""

    def __init__(self, f: Polynomial, q: int):
        self.q = q
        self.terms = []
        for c, e in f.items():
            c = _coeff_mod(c, q)
            if c:
                self.terms.append((c, tuple((i, k) for i, k in enumerate(e) if k)))
        self.variables = frozenset(i for _, e in self.terms for i, _ in e)

    def __call__(self, X):
        q = self.q
        m = X.shape[1]
        out = np.zeros(m, dtype=np.int64)
        for c, e in self.terms:
            v = np.full(m, c, dtype=np.int64)
            for i, k in e:
                for _ in range(k):
                    v = v * X[i] % q
            out += v
            out %= q
        return out


def compile_poly(f: Polynomial, q: int) -> CompiledPoly:
    return CompiledPoly(f, q)


def _affine_parts(f: Polynomial, v: int):
    """(a, b) with f = a*x_v + b, or None when f has degree > 1 in x_v."""
    d = f.degree_in(v)
    if d > 1:
        return None
    if d <= 0:
        return f.ring.zero, f
    a = f.diff(v)
    return a, f - a * f.ring.gens()[v]


# ---------------------------------------------------------------------------
# estimation


@dataclass
class CodimEstimate:
    hits: int
    samples: int
    q: int
    method: str
    seed: int
    points: float = 0.0
    frequency: float = 0.0
    estimate: float | None = None
    ci: tuple | None = None
    status: str = "ok"
    wide: bool = False
    stderr: float | None = None

    def to_dict(self):
        d = asdict(self)
        d["ci"] = list(self.ci) if self.ci else None
        return d


def wilson(hits: int, n: int, z: float = Z95):
    p = hits / n
    den = 1 + z * z / n
    mid = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    lo = 0.0 if hits == 0 else max(mid - half, 0.0)
    hi = 1.0 if hits == n else min(mid + half, 1.0)
    return lo, hi


def _neglog(p: float, q: int):
    return math.inf if p <= 0 else -math.log(p) / math.log(q)


def _finish(est: CodimEstimate, lo: float, hi: float, tol: float):
    if est.hits == 0:
        est.status = "insufficient samples"
        return est
    est.estimate = _neglog(est.frequency, est.q)
    est.ci = (_neglog(hi, est.q), _neglog(lo, est.q))
    est.wide = (est.ci[1] - est.ci[0]) / 2 > tol
    return est


def _default_ideal(cfg: SampleConfig) -> Ideal:
    return principal_minor_ideal(cfg.n, cfg.t, Field(cfg.q))


class _Plan:
    def __init__(self, cfg: SampleConfig, ideal: Ideal, fiber_var: int | None):
        q = cfg.q
        ring = ideal.ring
        if ring.nvars != cfg.n * cfg.n:
            raise ValueError("ideal does not live in the n x n matrix ring")
        gens = list(ideal.gens)
        D = determinant(ring) if cfg.invertible else None
        self.cfg = cfg
        self.v = fiber_var
        if fiber_var is None:
            self.free = [compile_poly(g, q) for g in gens]
            self.det = compile_poly(D, q) if D is not None else None
            return
        parts = [_affine_parts(g, fiber_var) for g in gens]
        if any(p is None for p in parts) or (D is not None and _affine_parts(D, fiber_var) is None):
            raise ValueError("a generator is not affine in the fiber variable")
        self.free = [compile_poly(b, q) for a, b in parts if not a]
        self.lin = [(compile_poly(a, q), compile_poly(b, q)) for a, b in parts if a]
        self.det = None
        if D is not None:
            a, b = _affine_parts(D, fiber_var)
            self.det = (compile_poly(a, q), compile_poly(b, q))

    def count_chunk(self, X):
        """Plain mode: hits.  Fiber mode: (nonzero fibers, sum of fiber sizes, sum of squares)."""
        q = self.cfg.q
        keep = np.ones(X.shape[1], dtype=bool)
        for g in self.free:
            idx = np.flatnonzero(keep)
            if not idx.size:
                break
            keep[idx] = g(X[:, idx]) == 0
        idx = np.flatnonzero(keep)
        Y = X[:, idx]
        if self.v is None:
            if self.det is not None and idx.size:
                ok = self.det(Y) != 0
                idx, Y = idx[ok], Y[:, ok]
            return int(idx.size)
        m = idx.size
        if not m:
            return 0, 0, 0
        # solution set of the affine system: all of F_q, one root, or empty
        whole = np.ones(m, dtype=bool)
        root = np.full(m, -1, dtype=np.int64)
        empty = np.zeros(m, dtype=bool)
        for ca, cb in self.lin:
            a, b = ca(Y), cb(Y)
            nz = a != 0
            r = (q - b) % q * powmod(np.where(nz, a, 1), q - 2, q) % q
            empty |= ~nz & (b != 0)
            clash = nz & (root >= 0) & (root != r)
            empty |= clash
            root = np.where(nz & (root < 0), r, root)
            whole &= ~nz
        cnt = np.where(empty, 0, np.where(whole & (root < 0), q, 1)).astype(np.int64)
        if self.det is not None:
            a, b = self.det[0](Y), self.det[1](Y)
            one = cnt == 1
            at_root = (a * np.maximum(root, 0) + b) % q
            cnt = np.where(one & (at_root == 0), 0, cnt)
            full = cnt == q
            # det affine in v: a != 0 loses exactly one value; a = 0 keeps all iff b != 0
            cnt = np.where(full & (a != 0), q - 1, cnt)
            cnt = np.where(full & (a == 0) & (b == 0), 0, cnt)
        return int((cnt > 0).sum()), int(cnt.sum()), int((cnt * cnt).sum())


def default_fiber_var(cfg: SampleConfig, ideal: Ideal) -> int | None:
    """x_nn when every generator (and det) is affine in it and no rank constraint."""
    if cfg.rank is not None and not (cfg.invertible or cfg.rank == cfg.n):
        return None
    v = ideal.ring.nvars - 1
    if all(g.degree_in(v) <= 1 for g in ideal.gens):
        return v
    return None


def estimate_codim(cfg: SampleConfig, ideal: Ideal | None = None, method: str = "auto",
                   fiber_var: int | None = None, tol: float = 0.5) -> CodimEstimate:
    """Monte Carlo codimension of V(ideal) (within rank-r or invertible matrices).

    ``method`` is ``count``, ``fiber`` or ``auto`` (fiber whenever possible).
    With a rank constraint r < n the frequency is relative to the rank-r
    locus, so the estimate is the codimension inside that locus.
    """
    ideal = ideal if ideal is not None else _default_ideal(cfg)
    if method not in ("auto", "count", "fiber"):
        raise ValueError(f"unknown method {method!r}")
    if cfg.rank == cfg.n and not cfg.invertible:
        cfg = SampleConfig(**{**asdict(cfg), "rank": None, "invertible": True})
    if method != "count":
        v = fiber_var if fiber_var is not None else default_fiber_var(cfg, ideal)
        if v is None and method == "fiber":
            raise ValueError("no admissible fiber variable")
        if cfg.rank is not None and cfg.rank < cfg.n and method == "fiber":
            raise ValueError("fiber mode does not support rank constraints below n")
        method = "fiber" if v is not None else "count"
    plan = _Plan(cfg, ideal, v if method == "fiber" else None)

    def work(item):
        m, rng = item
        return plan.count_chunk(_draw(rng, cfg, m))

    streams = _streams(cfg)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            parts = list(ex.map(work, streams))
    else:
        parts = [work(s) for s in streams]

    N, q = cfg.samples, cfg.q
    if method == "count":
        hits = sum(parts)
        est = CodimEstimate(hits, N, q, "count", cfg.seed, points=float(hits), frequency=hits / N)
        lo, hi = wilson(hits, N)
        return _finish(est, lo, hi, tol)
    hits = sum(p[0] for p in parts)
    s1 = sum(p[1] for p in parts)
    s2 = sum(p[2] for p in parts)
    freq = s1 / (N * q)
    # per-sample values are cnt/q; sample variance of their mean
    var = max(s2 / (q * q) - N * freq * freq, 0.0) / max(N - 1, 1) / N
    se = math.sqrt(var)
    est = CodimEstimate(hits, N, q, "fiber", cfg.seed, points=float(s1), frequency=freq, stderr=se)
    lo, hi = max(freq - Z95 * se, 0.0), freq + Z95 * se
    return _finish(est, lo, hi, tol)


# ---------------------------------------------------------------------------
# exhaustive census


@dataclass
class Census:
    n: int
    q: int
    t: int
    by_rank: dict = dc_field(default_factory=dict)
    all_by_rank: dict = dc_field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.by_rank.values())

    def rows(self):
        return [(self.n, self.q, self.t, r, c) for r, c in sorted(self.by_rank.items())]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "q", "t", "rank", "count"])
        w.writerows(self.rows())
        return buf.getvalue()

    def to_dict(self):
        return {"n": self.n, "q": self.q, "t": self.t,
                "by_rank": {str(k): v for k, v in sorted(self.by_rank.items())},
                "all_by_rank": {str(k): v for k, v in sorted(self.all_by_rank.items())}}


def all_matrices(n: int, q: int, start: int = 0, stop: int | None = None):
    """Entries of matrices start..stop-1 in base-q order (first entry most significant)."""
    stop = q ** (n * n) if stop is None else stop
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((n * n, idx.size), dtype=np.int64)
    for k in range(n * n - 1, -1, -1):
        out[k] = idx % q
        idx //= q
    return out


def exhaustive_count(n: int, q: int, t: int, ideal: Ideal | None = None,
                     limit: int = CENSUS_LIMIT, block: int = 1 << 20) -> Census:
    """Exact point count of V(P_t) over F_q split by matrix rank."""
    Field(q)
    total = q ** (n * n)
    if total > limit:
        raise BudgetExceeded("census size", limit)
    ideal = ideal if ideal is not None else principal_minor_ideal(n, t, Field(q))
    gens = [compile_poly(g, q) for g in ideal.gens]
    by_rank = {r: 0 for r in range(n + 1)}
    all_by = {r: 0 for r in range(n + 1)}
    for s in range(0, total, block):
        X = all_matrices(n, q, s, min(s + block, total))
        rk = batch_rank(X, n, q)
        inside = np.ones(X.shape[1], dtype=bool)
        for g in gens:
            inside &= g(X) == 0
        for r, c in zip(*np.unique(rk, return_counts=True)):
            all_by[int(r)] += int(c)
        for r, c in zip(*np.unique(rk[inside], return_counts=True)):
            by_rank[int(r)] += int(c)
    return Census(n, q, t, by_rank, all_by)


def census_frequency(c: Census, rank: int | None = None) -> float:
    total = c.q ** (c.n * c.n)
    hits = c.total if rank is None else c.by_rank.get(rank, 0)
    return hits / total


def brute_rank(M, q: int) -> int:
    """Scalar rank over F_q, used to cross-check the vectorized routine."""
    A = [[x % q for x in r] for r in M]
    r = 0
    for c in range(len(A[0]) if A else 0):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], q - 2, q)
        A[r] = [x * inv % q for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % q for x, y in zip(A[i], A[r])]
        r += 1
    return r


__all__ = [
    "SampleConfig", "SamplingError", "CodimEstimate", "Census", "CompiledPoly",
    "batch_rank", "batch_rank_rect", "brute_rank", "sample_matrices", "sample_matrix",
    "compile_poly", "estimate_codim", "exhaustive_count", "census_frequency", "wilson",
    "all_matrices", "powmod", "default_fiber_var",
]

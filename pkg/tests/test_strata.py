import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from pmx.groebner import BudgetExceeded
from pmx.minors import all_minors, principal_minor_ideal
from pmx.poly import Field, det, evaluate
from pmx.strata import (SampleConfig, _Plan, all_matrices, batch_rank, brute_rank,
                        compile_poly, estimate_codim, exhaustive_count, sample_matrices,
                        sample_matrix, wilson)


def rank_r_count(n, r, q):
    """Number of n x n matrices of rank r over F_q (closed form)."""
    num = 1
    for i in range(r):
        num *= (q**n - q**i) ** 2
    den = 1
    for i in range(r):
        den *= q**r - q**i
    return num // den


@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_batch_rank_matches_scalar(q, n, seed):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, q, size=(n * n, 64))
    X[:, :8] = 0
    got = batch_rank(X, n, q)
    for k in range(64):
        assert got[k] == brute_rank(X[:, k].reshape(n, n).tolist(), q)


@given(st.integers(0, 10**6))
def test_compiled_evaluation_matches_evaluate(seed):
    P = principal_minor_ideal(3, 2, Field(11))
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 11, size=(9, 5))
    for g in P.gens:
        vals = compile_poly(g, 11)(X)
        for k in range(5):
            assert vals[k] == evaluate(g, X[:, k].reshape(3, 3).tolist())


def test_config_validation():
    with pytest.raises(ValueError):
        SampleConfig(3, 2, 4)
    with pytest.raises(ValueError):
        SampleConfig(3, 4, 5)
    with pytest.raises(ValueError):
        SampleConfig(3, 2, 5, samples=0)
    with pytest.raises(ValueError):
        SampleConfig(3, 2, 5, rank=4)
    with pytest.raises(ValueError):
        SampleConfig(3, 2, 5, rank=2, invertible=True)


# -- sampling ------------------------------------------------------------------


@pytest.mark.parametrize("n,r,q", [(2, 1, 2), (3, 2, 5), (4, 2, 3), (4, 4, 2), (3, 0, 7)])
def test_rank_constrained_samples(n, r, q):
    X = sample_matrices(SampleConfig(n, 1, q, samples=400, rank=r, seed=1))
    ranks = batch_rank(X, n, q)
    assert (ranks == r).all()
    for k in range(0, 400, 40):
        M = X[:, k].reshape(n, n).tolist()
        assert brute_rank(M, q) == r
        if r < n:
            assert not any(v % q for v in all_minors(M, r + 1).values())
        if r:
            assert any(v % q for v in all_minors(M, r).values())


def test_single_samples():
    M = sample_matrix(SampleConfig(3, 2, 7, rank=3, seed=4))
    assert det(M, 1) % 7
    M = sample_matrix(SampleConfig(2, 1, 7, rank=1, seed=4))
    assert det(M, 1) % 7 == 0
    M = sample_matrix(SampleConfig(3, 1, 5, invertible=True, seed=9))
    assert det(M, 1) % 5


def test_unconstrained_rank_distribution_f2():
    N = 200_000
    X = sample_matrices(SampleConfig(2, 1, 2, samples=N, seed=3))
    ranks = batch_rank(X, 2, 2)
    for r in range(3):
        p = rank_r_count(2, r, 2) / 16
        hits = int((ranks == r).sum())
        assert abs(hits - N * p) <= 4 * math.sqrt(N * p * (1 - p))
    assert rank_r_count(2, 2, 2) == 6


def test_reproducible_and_worker_independent():
    cfg = SampleConfig(3, 2, 5, samples=50_000, seed=17, chunk=8192)
    a = sample_matrices(cfg)
    b = sample_matrices(cfg)
    assert (a == b).all()
    e1 = estimate_codim(SampleConfig(3, 2, 5, samples=50_000, seed=17, chunk=8192))
    e4 = estimate_codim(SampleConfig(3, 2, 5, samples=50_000, seed=17, chunk=8192, workers=4))
    assert e1 == e4
    other = estimate_codim(SampleConfig(3, 2, 5, samples=50_000, seed=18, chunk=8192))
    assert other.points != e1.points


# -- estimation ----------------------------------------------------------------


def test_p1_frequency_is_exact_q_to_minus_n():
    N, q = 400_000, 11
    est = estimate_codim(SampleConfig(2, 1, q, samples=N, seed=5), method="count")
    p = q**-2
    assert abs(est.hits - N * p) <= 4 * math.sqrt(N * p * (1 - p))
    assert est.ci[0] <= 2.0 <= est.ci[1]
    fib = estimate_codim(SampleConfig(2, 1, q, samples=N, seed=5), method="fiber")
    assert fib.ci[0] <= 2.0 <= fib.ci[1]


def test_insufficient_samples():
    est = estimate_codim(SampleConfig(4, 3, 101, samples=1000, invertible=True), method="count")
    assert est.hits == 0 and est.estimate is None
    assert est.status == "insufficient samples"


def test_fiber_rejects_nonaffine_and_rank_constraints():
    with pytest.raises(ValueError):
        estimate_codim(SampleConfig(3, 2, 5, samples=10, rank=1), method="fiber")
    with pytest.raises(ValueError):
        estimate_codim(SampleConfig(3, 2, 5, samples=10), method="bogus")


@pytest.mark.parametrize("n,t,q,inv", [(3, 2, 3, True), (3, 2, 3, False), (2, 1, 5, True),
                                       (3, 1, 2, False)])
def test_fiber_counts_are_exact(n, t, q, inv):
    """Summing fiber sizes over every base point reproduces the exhaustive count."""
    cfg = SampleConfig(n, t, q, samples=1, invertible=inv)
    ideal = principal_minor_ideal(n, t, Field(q))
    plan = _Plan(cfg, ideal, n * n - 1)
    X = all_matrices(n, q)
    base = X[:, X[-1] == 0]
    _, total, _ = plan.count_chunk(base)
    census = exhaustive_count(n, q, t)
    expect = census.by_rank[n] if inv else census.total
    assert total == expect


def test_wilson_interval():
    lo, hi = wilson(0, 100)
    assert lo == 0.0 and 0 < hi < 0.05
    lo, hi = wilson(50, 100)
    assert lo < 0.5 < hi


# -- census --------------------------------------------------------------------


def test_census_examples():
    assert exhaustive_count(2, 2, 1).total == 4
    assert exhaustive_count(2, 2, 2).total == 10
    c = exhaustive_count(4, 2, 3)
    assert c.by_rank[4] > 0
    assert sum(c.all_by_rank.values()) == 2**16


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (2, 5), (3, 2), (3, 3), (4, 2)])
def test_census_rank_totals_match_closed_form(n, q):
    c = exhaustive_count(n, q, 1)
    assert sum(c.all_by_rank.values()) == q ** (n * n)
    for r in range(n + 1):
        assert c.all_by_rank[r] == rank_r_count(n, r, q)
    assert c.total == q ** (n * n - n)


def test_census_n4_full_rank_points_by_brute_force():
    # pure-python oracle over all 65536 binary matrices
    count = 0
    for bits in product((0, 1), repeat=16):
        M = [bits[4 * i:4 * i + 4] for i in range(4)]
        if det(M, 1) % 2 == 0:
            continue
        ok = True
        for k in range(4):
            idx = [i for i in range(4) if i != k]
            if det([[M[i][j] for j in idx] for i in idx], 1) % 2:
                ok = False
                break
        count += ok
    assert exhaustive_count(4, 2, 3).by_rank[4] == count


def test_census_budget_and_csv():
    with pytest.raises(BudgetExceeded):
        exhaustive_count(3, 7, 2)
    text = exhaustive_count(2, 2, 2).to_csv().splitlines()
    assert text[0] == "n,q,t,rank,count"
    assert text[1:] == ["2,2,2,0,1", "2,2,2,1,9", "2,2,2,2,0"]

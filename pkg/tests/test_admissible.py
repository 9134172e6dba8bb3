import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otlab.admissible import (
    count_bounded_square_sum,
    greedy_admissible_submatrix,
    is_admissible,
    lemma42_bound,
)
from otlab.errors import BudgetExceededError, DomainError, DuplicateColumnsError
from otlab.fourier import index_to_vector, sigma_stat
from otlab.generators import random_distinct_column_matrix
from otlab.modlinalg import ModMatrix, rank_mod_p
from otlab.numtheory import LOG_SLACK

import oracles


def M(rows, p):
    return ModMatrix.from_rows(rows, p)


def naive_admissible(S, sigma):
    p, c = S.modulus, S.cols
    return all(sigma_stat(S, index_to_vector(i, p, c)) > sigma for i in range(1, p**c))


def full_plane(p):
    cols = list(itertools.product(range(p), repeat=2))
    return ModMatrix(np.array(cols, dtype=np.int64).T, p)


def test_is_admissible_examples(backend):
    half = Fraction(1, 2)
    assert is_admissible(ModMatrix.identity(2, 3), half)
    assert not is_admissible(M([[0]], 5), 0)
    assert not is_admissible(M([[0]], 5), 7)
    assert is_admissible(M([[1], [1]], 3), half)


def test_is_admissible_budget():
    with pytest.raises(BudgetExceededError):
        is_admissible(ModMatrix.identity(5, 7), 1, budget=1000)


def test_greedy_examples(backend):
    r = greedy_admissible_submatrix(full_plane(3), Fraction(1, 2))
    assert r.column_indices == [1, 3] and r.c_prime == 2
    assert r.bound == pytest.approx(-0.454179664294716888, abs=1e-12)
    r = greedy_admissible_submatrix(ModMatrix.identity(2, 3), 3)
    assert r.c_prime == 0 and r.column_indices == []


def test_greedy_rejects():
    with pytest.raises(DuplicateColumnsError):
        greedy_admissible_submatrix(M([[1, 1]], 3), 0)
    with pytest.raises(DomainError):
        greedy_admissible_submatrix(ModMatrix.identity(2, 4), 0)
    with pytest.raises(BudgetExceededError):
        greedy_admissible_submatrix(ModMatrix.identity(6, 7), 0, budget=1000)


def test_sigma_below_one_means_independent(backend):
    # with sigma < 1 admissible is the same as linearly independent columns
    for p in (3, 5):
        r = greedy_admissible_submatrix(full_plane(p), Fraction(1, 3))
        S = full_plane(p).columns(r.column_indices)
        assert rank_mod_p(S.T, p) == r.c_prime == 2


def test_greedy_lower_bound_examples():
    assert lemma42_bound(9, 2, Fraction(1, 2), 3) == pytest.approx(-0.454179664294716888, abs=1e-12)
    for c, p in ((8, 3), (100, 5)):
        assert lemma42_bound(c, 3, 0, p) == pytest.approx(math.log2(c) / math.log2(p) - 1, abs=1e-12)
    with pytest.raises(DomainError):
        lemma42_bound(0, 1, 0, 3)
    with pytest.raises(DomainError):
        lemma42_bound(4, 1, 0, 4)


@pytest.mark.parametrize("p", [3, 5, 7, 11])
@pytest.mark.parametrize("d", [36, 72, 108])
def test_greedy_lower_bound_at_d_over_36(p, d):
    # sigma = d/36 and log c >= d/3 give at least d/(12 log p) - 1
    c = 2 ** math.ceil(d / 3)
    assert lemma42_bound(c, d, Fraction(d, 36), p) >= d / (12 * math.log2(p)) - 1 - LOG_SLACK


@pytest.mark.parametrize("d, sigma, want", [(1, 1, 3), (2, 0, 1), (2, 2, 9)])
def test_square_sum_examples(d, sigma, want):
    assert count_bounded_square_sum(d, sigma) == want


@given(st.integers(0, 4), st.fractions(min_value=0, max_value=12, max_denominator=5))
@settings(max_examples=100)
def test_square_sum_matches_dp(d, sigma):
    assert count_bounded_square_sum(d, sigma) == oracles.square_sum_count(d, sigma)


def test_square_sum_rejects():
    with pytest.raises(DomainError):
        count_bounded_square_sum(-1, 1)
    with pytest.raises(BudgetExceededError):
        count_bounded_square_sum(10, 100, budget=1000)


# --- properties ------------------------------------------------------------


@pytest.mark.parametrize("p", [3, 5])
def test_heredity(p, rng, backend):
    checked = 0
    for _ in range(150):
        d = int(rng.integers(1, 5))
        c = int(rng.integers(1, 5))
        if c > p**d:
            continue
        S = random_distinct_column_matrix(rng, p, d, c)
        sigma = Fraction(int(rng.integers(0, 6)), int(rng.integers(1, 3)))
        ok = is_admissible(S, sigma)
        assert ok == naive_admissible(S, sigma)
        if ok:
            checked += 1
            for k in range(1, c):
                for sub in itertools.combinations(range(c), k):
                    assert is_admissible(S.columns(sub), sigma)
    assert checked > 10


@given(
    st.sampled_from([3, 5]),
    st.integers(1, 3),
    st.integers(1, 3),
    st.integers(0, 2**31),
    st.fractions(min_value=0, max_value=6, max_denominator=4),
    st.fractions(min_value=0, max_value=6, max_denominator=4),
)
@settings(max_examples=150, deadline=None)
def test_monotone_in_sigma(p, d, c, seed, s1, s2):
    lo, hi = min(s1, s2), max(s1, s2)
    S = random_distinct_column_matrix(np.random.default_rng(seed), p, d, min(c, p**d))
    if is_admissible(S, hi):
        assert is_admissible(S, lo)


def random_greedy_inputs(seed, count):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        p = int(rng.choice([3, 5, 7]))
        d = int(rng.integers(1, 7))
        c = int(rng.integers(1, min(p**d, 40) + 1))
        sigma = Fraction(int(rng.integers(0, 3 * d + 1)), int(rng.integers(1, 4)))
        out.append((random_distinct_column_matrix(rng, p, d, c), sigma))
    return out


def test_greedy_random(backend):
    for L, sigma in random_greedy_inputs(0, 200):
        r = greedy_admissible_submatrix(L, sigma, budget=10**6)
        S = L.columns(r.column_indices)
        assert is_admissible(S, sigma)
        for j in set(range(L.cols)) - set(r.column_indices):
            assert not is_admissible(L.columns(r.column_indices + [j]), sigma)
        assert r.c_prime >= r.bound - LOG_SLACK
        assert r.column_indices == sorted(r.column_indices)

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otlab.errors import InvalidModulusError
from otlab.numtheory import (
    NOT_APPLICABLE,
    binary_entropy,
    bound_table,
    epsilon_of,
    factorize,
    is_prime,
)


@pytest.mark.parametrize(
    "ell, factors, omega",
    [(12, ((2, 2), (3, 1)), 2), (6, ((2, 1), (3, 1)), 2), (360, ((2, 3), (3, 2), (5, 1)), 3)],
)
def test_factorize_examples(ell, factors, omega):
    fac = factorize(ell)
    assert fac.factors == factors
    assert fac.omega == omega


@pytest.mark.parametrize("bad", [1, 0, -6, 2.0, True])
def test_factorize_rejects(bad):
    with pytest.raises(InvalidModulusError):
        factorize(bad)


def test_factorize_recomposes_exhaustively():
    # primes by a sieve, independent of trial division
    N = 10**6
    sieve = bytearray([1]) * (N + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, int(N**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    for ell in range(2, N + 1):
        fac = factorize(ell)
        assert fac.recompose() == ell
        ps = fac.primes
        assert all(sieve[p] for p in ps)
        assert all(a >= 1 for _, a in fac.factors)
        assert list(ps) == sorted(set(ps))


@pytest.mark.parametrize("ell, eps", [(15, Fraction(1, 500)), (105, Fraction(37, 12250)), (12, Fraction(0))])
def test_epsilon_examples(ell, eps):
    assert epsilon_of(ell) == eps


@given(st.integers(2, 5000))
def test_epsilon_positive_iff_two_odd_primes(ell):
    odd = [p for p, _ in factorize(ell).factors if p > 2]
    assert (epsilon_of(ell) > 0) == (len(odd) >= 2)


def test_bound_table_regression():
    r = bound_table(6, 1024)
    assert (r.trivial, r.szegedy, r.thm11) == (2048, 2028, 2019)
    assert r.thm12 is NOT_APPLICABLE


def test_bound_table_prime_power():
    r = bound_table(4, 100)
    assert r.trivial == 100
    assert r.thm11 is NOT_APPLICABLE and r.thm12 is NOT_APPLICABLE and r.szegedy is NOT_APPLICABLE


def test_bound_table_refined_exact():
    r = bound_table(15, 2**20)
    assert r.thm12 == 2 * 2**20 - (4 + Fraction(1, 500)) * 20
    assert isinstance(r.thm12, Fraction)


def test_bound_table_non_square_free_has_no_square_free_bound():
    assert bound_table(12, 64).szegedy is NOT_APPLICABLE
    assert bound_table(12, 64).thm11 == 2 * 64 - 4 * 6 + 11


def test_bound_table_rejects_bad_n():
    with pytest.raises(InvalidModulusError):
        bound_table(6, 0)


@given(st.integers(2, 3000), st.integers(2, 10**6))
@settings(max_examples=300)
def test_bound_invariants(ell, n):
    fac = factorize(ell)
    r = bound_table(ell, n)
    assert (r.szegedy is not NOT_APPLICABLE) == (fac.is_squarefree and fac.omega >= 2)
    assert (r.thm11 is not NOT_APPLICABLE) == (fac.omega >= 2)
    assert (r.thm12 is not NOT_APPLICABLE) == (len(fac.odd_primes) >= 2)
    if fac.omega >= 2:
        assert r.thm11 <= r.trivial + 11 + 1e-12
        if fac.is_squarefree:
            assert r.thm11 <= r.szegedy + 11 + 1e-12
    if r.thm12 is not NOT_APPLICABLE:
        assert r.thm12 < r.thm11


def test_entropy_values():
    assert binary_entropy(Fraction(1, 2)) == 1
    assert binary_entropy(0) == 0 and binary_entropy(1) == 0
    # reference value from 30-digit mpmath evaluation
    assert binary_entropy(Fraction(1, 37)) == pytest.approx(0.179256066928321536, abs=1e-12)
    assert Fraction(1, 36) + Fraction(37, 36) * Fraction(binary_entropy(Fraction(1, 37))) <= Fraction(1, 4)


def test_entropy_rejects_out_of_range():
    with pytest.raises(ValueError):
        binary_entropy(Fraction(3, 2))


@given(st.fractions(min_value=0, max_value=1, max_denominator=10**6))
@settings(max_examples=100)
def test_entropy_symmetric(q):
    assert binary_entropy(q) == pytest.approx(binary_entropy(1 - q), abs=1e-12)


@given(
    st.fractions(min_value=0, max_value=1, max_denominator=1000),
    st.fractions(min_value=0, max_value=1, max_denominator=1000),
)
def test_entropy_midpoint_concave(a, b):
    mid = (a + b) / 2
    assert binary_entropy(mid) + 1e-12 >= (binary_entropy(a) + binary_entropy(b)) / 2


def test_is_prime():
    assert [q for q in range(30) if is_prime(q)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from otlab.errors import DomainError, InvalidFamilyError
from otlab.generators import random_oddtown
from otlab.modlinalg import ModMatrix, rank_mod_p
from otlab.numtheory import factorize
from otlab.oddtown import (
    SetFamily,
    certify,
    classify_primes,
    dedup_columns,
    family_from_json,
    family_to_json,
    incidence_matrix,
    read_family,
    singleton_family,
    split,
    support_reduce,
    verify_family,
    write_family,
)

import oracles


def fam(n, *sets):
    return SetFamily.from_lists(n, sets)


def as_sets(F):
    return [set(s) for s in F.to_lists()]


# --- SetFamily -------------------------------------------------------------


def test_setfamily_canonical_order():
    assert fam(3, [3], [1]) == fam(3, [1], [3])
    assert fam(3, [3], [1]).to_lists() == [[1], [3]]


@pytest.mark.parametrize(
    "n, sets",
    [(3, [[4]]), (3, [[0]]), (3, [[1], [1]]), (3, [[1, 1]])],
)
def test_setfamily_rejects(n, sets):
    with pytest.raises(InvalidFamilyError):
        SetFamily.from_lists(n, sets)


def test_empty_set_is_representable():
    F = fam(2, [])
    assert F.sizes() == [0]
    assert not verify_family(F, 3).valid


# --- verify ------------------------------------------------------------------


def test_verify_examples():
    assert verify_family(singleton_family(4), 6).valid
    v = verify_family(fam(5, [1, 2, 3], [4, 5]), 3)
    assert not v.valid and v.witness == ([1, 2, 3],)
    v = verify_family(fam(3, [1, 2], [2, 3]), 3)
    assert not v.valid and v.witness == ([1, 2], [2, 3])


def test_verify_rejects_bad_modulus():
    with pytest.raises(DomainError):
        verify_family(singleton_family(2), 1)


@given(st.integers(1, 5), st.integers(2, 7), st.data())
@settings(max_examples=200)
def test_verify_matches_oracle(n, ell, data):
    masks = data.draw(st.sets(st.integers(0, 2**n - 1), max_size=5))
    F = SetFamily(n, tuple(masks))
    assert verify_family(F, ell).valid == oracles.is_oddtown(as_sets(F), ell)


# --- split / incidence / dedup -----------------------------------------------


def test_split_examples():
    A, B = split(fam(4, [1], [1, 2, 3, 4]), 12, 0)
    assert A.to_lists() == [[1]] and B.to_lists() == [[1, 2, 3, 4]]
    A, B = split(singleton_family(5), 30, 2)
    assert A == singleton_family(5) and len(B) == 0
    A, B = split(fam(6, [1, 2, 3], [4, 5, 6], [1, 2]), 6, 1)
    assert A.to_lists() == [[1, 2]] and B.to_lists() == [[1, 2, 3], [4, 5, 6]]


def test_split_bad_index():
    with pytest.raises(DomainError):
        split(singleton_family(2), 6, 2)


@given(st.integers(1, 6), st.sampled_from([6, 12, 15, 30, 8]), st.data())
def test_split_is_partition(n, ell, data):
    F = SetFamily(n, tuple(data.draw(st.sets(st.integers(0, 2**n - 1), max_size=8))))
    for i in range(factorize(ell).omega):
        A, B = split(F, ell, i)
        assert not set(A.sets) & set(B.sets)
        assert set(A.sets) | set(B.sets) == set(F.sets)


def test_incidence_examples():
    assert incidence_matrix(fam(2, [1], [2])).to_lists() == [[1, 0], [0, 1]]
    assert incidence_matrix(SetFamily(3, ())).shape == (0, 3)
    assert incidence_matrix(fam(3, [1, 2])).to_lists() == [[1, 1, 0]]


def test_dedup_examples():
    Mp, cls = dedup_columns(ModMatrix.from_rows([[1, 1, 0], [0, 0, 1]], 2))
    assert Mp.to_lists() == [[1, 0], [0, 1]] and cls == [[0, 1], [2]]
    I = ModMatrix.identity(3, 5)
    Mp, cls = dedup_columns(I)
    assert Mp == I and cls == [[0], [1], [2]]
    Mp, cls = dedup_columns(ModMatrix.zeros(2, 3, 2))
    assert Mp.shape == (2, 1) and cls == [[0, 1, 2]]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_dedup_preserves_rank(p, rng):
    for _ in range(200):
        r, c = rng.integers(1, 6, size=2)
        A = ModMatrix(rng.integers(0, 2, size=(r, c)), p)
        Mp, cls = dedup_columns(A)
        assert rank_mod_p(Mp, p) == rank_mod_p(A, p)
        assert sorted(j for g in cls for j in g) == list(range(c))


# --- classify / reduce -------------------------------------------------------


def _with_columns(n, k):
    # A_i' for p=3: one set of size 3*k... built so the divisible part has k distinct columns
    sets = []
    for t in range(k - 1):
        sets.append(list(range(3 * t + 1, 3 * t + 4)))
    return SetFamily.from_lists(n, sets)


def test_classify_threshold():
    # 16**0.4 = 3.03: k-1 disjoint triples on [16] give k distinct columns (k-1 blocks plus zero)
    good = classify_primes(_with_columns(16, 4), 3)[3]
    assert good.distinct_columns == 4 and good.good
    bad = classify_primes(_with_columns(16, 3), 3)[3]
    assert bad.distinct_columns == 3 and not bad.good
    assert not classify_primes(singleton_family(5), 15)[5].good
    assert 2 not in classify_primes(singleton_family(5), 6)


def test_support_reduce_examples():
    assert support_reduce(fam(4, [1, 2, 3], [4]), 2).to_lists() == [[1], [4]]
    F = singleton_family(5)
    assert support_reduce(F, 3) == F
    assert support_reduce(fam(7, [1, 2, 3, 4, 5, 6, 7]), 3).to_lists() == [[1]]


@pytest.mark.parametrize("ell", [6, 12, 15])
def test_support_reduce_random(ell):
    rng = np.random.default_rng(ell)
    for _ in range(500 // 3 + 1):
        n = int(rng.integers(1, 25))
        F = random_oddtown(rng, n, ell)
        G = support_reduce(F, ell)
        assert verify_family(G, ell).valid
        assert len(G) == len(F)


# --- certify -----------------------------------------------------------------


def test_certify_singletons():
    C = certify(singleton_family(8), 6)
    assert C.all_ok and C.size == 8
    for r in C.primes:
        assert r.size_A_i_prime == 0 and r.dim == 0 and r.eq3_ok and r.eq4_ok
    assert C.bounds["trivial"].bound == 16 and C.bounds["trivial"].holds


def test_certify_divisible_set():
    # {1..6} has size 6, so that family is rejected; {1..4} plays its role
    with pytest.raises(InvalidFamilyError):
        certify(fam(6, [1], [2], [1, 2, 3, 4, 5, 6]), 6)
    C = certify(fam(6, [5], [6], [1, 2, 3, 4]), 6)
    r2 = C.primes[0]
    assert (r2.p, r2.size_A_i, r2.size_A_i_prime, r2.dim) == (2, 2, 1, 1)
    assert 2 * r2.dim <= 6 - 2 and r2.eq3_ok and r2.eq4_ok


def test_certify_empty_family():
    assert certify(SetFamily(4, ()), 10).all_ok


def test_certify_rejects_invalid():
    with pytest.raises(InvalidFamilyError, match=r"\[1, 2, 3\]"):
        certify(fam(5, [1, 2, 3]), 3)


@pytest.mark.parametrize("ell", [6, 12, 15, 30])
def test_certify_random_families(ell):
    rng = np.random.default_rng(100 + ell)
    omega = factorize(ell).omega
    for _ in range(80):
        F = random_oddtown(rng, int(rng.integers(1, 25)), ell)
        C = certify(F, ell)
        assert C.all_ok
        assert len(F) <= omega * F.n
        for i, r in enumerate(C.primes):
            assert r.size_A_i + r.size_A_i_prime == len(F)
            if r.p != 2:
                assert r.cases is not None


def test_certify_threads_deterministic():
    rng = np.random.default_rng(3)
    for _ in range(20):
        F = random_oddtown(rng, 18, 30)
        assert certify(F, 30, threads=3) == certify(F, 30)


# --- JSON ------------------------------------------------------------------


def test_family_json_round_trip(tmp_path):
    F = fam(5, [1, 2], [5])
    assert family_to_json(F) == {"n": 5, "sets": [[1, 2], [5]]}
    assert family_from_json(json.loads(json.dumps(family_to_json(F)))) == F
    write_family(F, tmp_path / "f.json")
    assert read_family(tmp_path / "f.json") == F


@pytest.mark.parametrize("obj", [[], {"n": 3}, {"n": 3, "sets": [1]}, {"n": 3, "sets": [[5]]}])
def test_family_json_rejects(obj):
    with pytest.raises(InvalidFamilyError):
        family_from_json(obj)


def test_read_family_bad_json(tmp_path):
    p = tmp_path / "f.json"
    p.write_text("{")
    with pytest.raises(InvalidFamilyError):
        read_family(p)


def test_singletons():
    assert singleton_family(1).to_lists() == [[1]]
    assert verify_family(singleton_family(4), 6).valid
    F = singleton_family(10)
    assert verify_family(F, 15).valid and len(F) == 10

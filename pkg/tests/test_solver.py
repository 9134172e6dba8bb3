import pytest

from otlab.errors import BudgetExceededError, DomainError
from otlab.numtheory import factorize
from otlab.oddtown import verify_family
from otlab.solver import build_graph, max_oddtown, naive_max_oddtown


def test_graph_examples():
    G = build_graph(2, 3)
    assert sorted(int(v) for v in G.vertices) == [0b01, 0b10, 0b11]
    assert G.edges() == [(0b01, 0b10)]
    G = build_graph(1, 2)
    assert G.order == 1 and G.edges() == []
    assert build_graph(3, 2).order == 4


@pytest.mark.parametrize("n, ell", [(n, ell) for n in range(1, 6) for ell in (2, 3, 4, 6)])
def test_graph_matches_definition(n, ell):
    G = build_graph(n, ell)
    want_v = [s for s in range(1, 2**n) if bin(s).count("1") % ell]
    assert sorted(int(v) for v in G.vertices) == want_v
    want_e = sorted(
        (a, b) for i, a in enumerate(want_v) for b in want_v[i + 1 :] if bin(a & b).count("1") % ell == 0
    )
    assert G.edges() == want_e
    for i in range(G.order):
        assert not G.has_edge(i, i)
        for j in range(G.order):
            assert G.has_edge(i, j) == G.has_edge(j, i)
    degs = [G.degree(i) for i in range(G.order)]
    assert degs == sorted(degs, reverse=True)


def test_graph_rejects():
    with pytest.raises(DomainError):
        build_graph(0, 2)
    with pytest.raises(BudgetExceededError):
        build_graph(12, 2, budget=100)


@pytest.mark.parametrize("n, ell, want", [(3, 2, 3), (2, 3, 2), (4, 6, 4)])
def test_solve_examples(n, ell, want, backend):
    r = max_oddtown(n, ell)
    assert r.max_size == want and r.optimal
    assert len(r.witness) == want and verify_family(r.witness, ell).valid


@pytest.mark.parametrize("n, ell", [(n, ell) for n in range(1, 5) for ell in (2, 3, 4, 6)])
def test_solve_matches_naive(n, ell, backend):
    try:
        want = naive_max_oddtown(n, ell)
    except DomainError:
        pytest.skip("more than 20 candidates")
    assert max_oddtown(n, ell).max_size == want


def test_naive_oracle_cap():
    with pytest.raises(DomainError):
        naive_max_oddtown(6, 2)


@pytest.mark.parametrize("n, ell", [(n, ell) for n in range(1, 7) for ell in (2, 3, 5, 6, 10, 12)])
def test_sandwich(n, ell):
    r = max_oddtown(n, ell)
    omega = factorize(ell).omega
    assert n <= r.max_size <= omega * n
    if omega == 1:
        assert r.max_size == n


@pytest.mark.parametrize("n, ell", [(5, 6), (6, 2), (6, 12), (7, 6)])
def test_deterministic_across_threads(n, ell, backend):
    base = max_oddtown(n, ell)
    for t in (2, 3):
        r = max_oddtown(n, ell, threads=t)
        assert r.witness == base.witness and r.max_size == base.max_size


def test_budget_exhaustion_flags_non_optimal(backend):
    r = max_oddtown(6, 6, budget=3)
    assert not r.optimal
    assert verify_family(r.witness, 6).valid and len(r.witness) == r.max_size

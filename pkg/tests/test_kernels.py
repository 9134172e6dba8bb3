"""The numba and numpy paths of every kernel must agree exactly."""

import numpy as np
import pytest

from otlab import _accel, kernels
from otlab.solver import _all_words, build_graph

pytestmark = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def both(fn, *args):
    out = {}
    for name in ("numba", "numpy"):
        old = _accel.set_backend(name)
        try:
            out[name] = fn(*args)
        finally:
            _accel.set_backend(old)
    return out["numba"], out["numpy"]


def test_set_backend_validates():
    with pytest.raises(ValueError):
        _accel.set_backend("fortran")


@pytest.mark.parametrize("p", [2, 3, 5, 7, 2**31 - 1])
def test_rref(p, rng):
    for _ in range(50):
        A = rng.integers(0, min(p, 10**6), size=tuple(rng.integers(0, 7, size=2)))
        (R1, p1), (R2, p2) = both(kernels.rref, A, p)
        assert np.array_equal(R1, R2) and np.array_equal(p1, p2)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_count01(p, rng):
    for _ in range(50):
        A = rng.integers(0, 2, size=(int(rng.integers(1, 5)), int(rng.integers(1, 7))))
        R, piv = kernels.rref(A, p)
        a, b = both(kernels.count01, R[: len(piv)], p)
        assert a == b


@pytest.mark.parametrize("p", [3, 5, 7])
def test_pmf_dft_sigma(p, rng):
    for _ in range(30):
        d, c = int(rng.integers(1, 9)), int(rng.integers(1, 4))
        L = rng.integers(0, p, size=(d, c))
        a, b = both(kernels.pmf_counts, L, p)
        assert np.array_equal(a, b)
        X = rng.integers(0, p, size=(5, c))
        w = rng.random(5)
        a, b = both(kernels.dft_support, X, w, p, c, -1)
        assert np.max(np.abs(a - b)) < 1e-12
        a, b = both(kernels.sigma_all, L, p)
        assert np.array_equal(a, b)
        for thr in range(0, 4):
            for last in (False, True):
                a, b = both(kernels.first_low_sigma, L, p, thr, last)
                assert a == b


@pytest.mark.parametrize("n, ell", [(4, 2), (5, 6), (6, 3)])
def test_max_clique(n, ell):
    G = build_graph(n, ell)
    P = _all_words(*G.adjacency.shape)

    def run():
        shared = np.zeros(1, dtype=np.int64)
        clique, size, nodes, done = kernels.max_clique(G.adjacency, [], P.copy(), shared, False, 10**7)
        return list(clique), size, done

    a, b = both(run)
    assert a == b
    a, b = both(kernels.colour_sort, G.adjacency, P)
    assert list(a[0]) == list(b[0]) and list(a[1]) == list(b[1])

"""Fourier analysis on F_p^c of the law of L^T v, v uniform on {0,1}^d.

Probabilities are exact (integer counts over 2**d).  Only spectra are
floating point; comparisons against them use ``SPECTRAL_TOL``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .budget import check_budget
from .errors import DomainError, DuplicateColumnsError
from .modlinalg import ModMatrix, has_distinct_columns
from .numtheory import is_prime

SPECTRAL_TOL = 1e-9


def index_to_vector(idx: int, p: int, c: int) -> tuple[int, ...]:
    """Lexicographic index (first coordinate most significant) to a vector."""
    out = []
    for _ in range(c):
        out.append(idx % p)
        idx //= p
    return tuple(reversed(out))


def vector_to_index(x: Sequence[int], p: int) -> int:
    idx = 0
    for v in x:
        idx = idx * p + int(v) % p
    return idx


def centered_inner(x: Sequence[int], xi: Sequence[int], p: int) -> int:
    """<x, xi> mod p as the representative in (-p/2, p/2]."""
    if len(x) != len(xi):
        raise DomainError(f"length mismatch: {len(x)} vs {len(xi)}")
    k = sum(int(a) * int(b) for a, b in zip(x, xi)) % p
    return k - p if 2 * k > p else k


@dataclass(frozen=True, eq=False)
class Pmf:
    """Exact pmf on F_p^c: ``mass(x) = counts[idx(x)] / denominator``."""

    p: int
    c: int
    counts: np.ndarray
    denominator: int

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        if counts.shape != (self.p**self.c,):
            raise DomainError("counts must have length p**c")
        if (counts < 0).any() or int(counts.sum()) != self.denominator:
            raise DomainError("pmf counts must be nonnegative and sum to the denominator")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    def mass(self, x: Sequence[int]) -> Fraction:
        return Fraction(int(self.counts[vector_to_index(x, self.p)]), self.denominator)

    def as_dict(self) -> dict[tuple[int, ...], Fraction]:
        """Nonzero masses only."""
        return {
            index_to_vector(int(i), self.p, self.c): Fraction(int(self.counts[i]), self.denominator)
            for i in np.flatnonzero(self.counts)
        }

    def support(self) -> np.ndarray:
        idx = np.flatnonzero(self.counts)
        return np.array([index_to_vector(int(i), self.p, self.c) for i in idx], dtype=np.int64).reshape(-1, self.c)

    def probabilities(self) -> np.ndarray:
        return self.counts / self.denominator

    def __eq__(self, other):
        if not isinstance(other, Pmf):
            return NotImplemented
        return (
            self.p == other.p
            and self.c == other.c
            and all(
                Fraction(int(a), self.denominator) == Fraction(int(b), other.denominator)
                for a, b in zip(self.counts, other.counts)
            )
        )


@dataclass(frozen=True, eq=False)
class Spectrum:
    p: int
    c: int
    values: np.ndarray  # complex, lexicographic in xi

    def at(self, xi: Sequence[int]) -> complex:
        return complex(self.values[vector_to_index(xi, self.p)])


def _check_matrix(L: ModMatrix, odd: bool = False) -> int:
    p = L.modulus
    if not is_prime(p):
        raise DomainError(f"matrix modulus {p} is not prime")
    if odd and p == 2:
        raise DomainError("this operation needs an odd prime")
    return p


def pmf_of_linear_image(L: ModMatrix, budget: int | None = None) -> Pmf:
    """Exact law of ``L^T v`` for ``v`` uniform on {0,1}^d (all 2**d enumerated)."""
    p = _check_matrix(L)
    d, c = L.shape
    check_budget("pmf", 2**d, budget)
    check_budget("spectrum", p**c, None)
    return Pmf(p, c, kernels.pmf_counts(L.entries, p), 2**d)


def point_mass(p: int, c: int, x: Sequence[int] | None = None) -> Pmf:
    counts = np.zeros(p**c, dtype=np.int64)
    counts[vector_to_index(x or (0,) * c, p)] = 1
    return Pmf(p, c, counts, 1)


def convolve(f: Pmf, g: Pmf) -> Pmf:
    """Law of X + Y for independent X ~ f, Y ~ g, exact."""
    if (f.p, f.c) != (g.p, g.c):
        raise DomainError("pmfs live on different groups")
    p, c = f.p, f.c
    out = np.zeros(p**c, dtype=np.int64)
    gs = g.support()
    gw = g.counts[np.flatnonzero(g.counts)]
    powers = p ** np.arange(c - 1, -1, -1, dtype=np.int64)
    for x, w in zip(f.support(), f.counts[np.flatnonzero(f.counts)]):
        idx = ((gs + x) % p) @ powers
        np.add.at(out, idx, gw * w)
    return Pmf(p, c, out, f.denominator * g.denominator)


def row_pmf(L: ModMatrix, j: int) -> Pmf:
    """Law of r_j * b for a single fair bit b: mass 1/2 at 0 and at r_j."""
    p, c = L.modulus, L.cols
    counts = np.zeros(p**c, dtype=np.int64)
    counts[0] += 1
    counts[vector_to_index(L.entries[j], p)] += 1
    return Pmf(p, c, counts, 2)


def dft(f: Pmf, budget: int | None = None) -> Spectrum:
    """f_hat(xi) = sum_x f(x) exp(-2 pi i <x, xi> / p), by direct summation."""
    check_budget("spectrum", f.p**f.c, budget)
    nz = np.flatnonzero(f.counts)
    X = f.support()
    weights = f.counts[nz] / f.denominator
    return Spectrum(f.p, f.c, kernels.dft_support(X, weights, f.p, f.c, sign=-1))


def inverse_dft(s: Spectrum) -> np.ndarray:
    """f(x) = p**-c sum_xi f_hat(xi) exp(2 pi i <x, xi> / p), real part."""
    p, c = s.p, s.c
    size = p**c
    X = np.array([index_to_vector(i, p, c) for i in range(size)], dtype=np.int64).reshape(size, c)
    # summing over xi with the sign flipped is the same kernel with roles swapped
    out = np.empty(size, dtype=np.complex128)
    re = kernels.dft_support(X, s.values.real, p, c, sign=+1)
    im = kernels.dft_support(X, s.values.imag, p, c, sign=+1)
    out[:] = re + 1j * im
    return (out / size).real


def product_formula(L: ModMatrix) -> np.ndarray:
    """prod_j (1 + exp(-2 pi i <r_j, xi>/p)) / 2 for every xi, lexicographic."""
    p = _check_matrix(L)
    d, c = L.shape
    size = p**c
    out = np.ones(size, dtype=np.complex128)
    powers = p ** np.arange(c - 1, -1, -1, dtype=np.int64)
    idx = np.arange(size, dtype=np.int64)
    xi = (idx[:, None] // powers[None, :]) % p
    for j in range(d):
        k = kernels.centered_np(xi @ L.entries[j], p)
        out *= (1 + np.exp(-2j * np.pi * k / p)) / 2
    return out


def sigma_stat(L: ModMatrix, xi: Sequence[int]) -> int:
    """sum over rows r_j of centered(<r_j, xi>)**2."""
    if len(xi) != L.cols:
        raise DomainError(f"xi has length {len(xi)}, matrix has {L.cols} columns")
    p = L.modulus
    return sum(centered_inner(row, xi, p) ** 2 for row in L.entries.tolist())


@dataclass(frozen=True)
class Prop43Report:
    p: int
    d: int
    c: int
    max_violation: float
    argmax: tuple[int, ...]
    abs_fhat: np.ndarray
    bound: np.ndarray
    sigma: np.ndarray

    @property
    def holds(self) -> bool:
        return self.max_violation <= SPECTRAL_TOL


def prop43_check(L: ModMatrix, budget: int | None = None) -> Prop43Report:
    """Compare |f_hat(xi)| with exp(-pi^2 sigma(xi) / 2p^2) at every xi."""
    p = _check_matrix(L, odd=True)
    if not has_distinct_columns(L):
        raise DuplicateColumnsError("matrix columns must be distinct")
    spec = dft(pmf_of_linear_image(L, budget))
    sig = kernels.sigma_all(L.entries, p)
    bound = np.exp(-(math.pi**2) * sig / (2 * p * p))
    mag = np.abs(spec.values)
    gap = mag - bound
    k = int(np.argmax(gap))
    return Prop43Report(p, L.rows, L.cols, float(gap[k]), index_to_vector(k, p, L.cols), mag, bound, sig)


@dataclass(frozen=True)
class Lemma41Result:
    prob: Fraction
    bound: float
    preconditions_met: bool


def lemma41_probability(L: ModMatrix, budget: int | None = None) -> Lemma41Result:
    """Exact P[L^T v in {0,1}^c] against 3 * 2**(-d / 36p^2)."""
    p = _check_matrix(L, odd=True)
    if not has_distinct_columns(L):
        raise DuplicateColumnsError("matrix columns must be distinct")
    d, c = L.shape
    f = pmf_of_linear_image(L, budget)
    corners = [vector_to_index(index_to_vector(i, 2, c), p) for i in range(2**c)]
    prob = Fraction(int(f.counts[corners].sum()), f.denominator)
    bound = 3 * 2 ** (-d / (36 * p * p))
    pre = 36 * math.log2(p) <= d and (c >= 1 and d <= 3 * math.log2(c))
    if pre:
        assert prob <= bound, f"probability {prob} exceeds {bound}"
    return Lemma41Result(prob, bound, pre)


def lemma41_monte_carlo(L: ModMatrix, samples: int, seed: int = 0) -> tuple[float, float]:
    """Sampled estimate of P[L^T v in {0,1}^c] and its standard error."""
    p = L.modulus
    rng = np.random.default_rng(seed)
    hits = 0
    remaining = samples
    while remaining:
        k = min(remaining, 1 << 16)
        v = rng.integers(0, 2, size=(k, L.rows), dtype=np.int64)
        x = (v @ L.entries) % p
        hits += int(np.count_nonzero((x <= 1).all(axis=1)))
        remaining -= k
    est = hits / samples
    return est, math.sqrt(est * (1 - est) / samples)


def cosine_bound_gap(num: int = 10_000) -> float:
    """max of |cos t| - exp(-t^2/2) over a grid of (-pi/2, pi/2]."""
    t = np.linspace(-math.pi / 2, math.pi / 2, num + 1)[1:]
    return float(np.max(np.abs(np.cos(t)) - np.exp(-t * t / 2)))

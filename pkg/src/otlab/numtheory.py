"""Factorization of the modulus and closed-form Oddtown bounds."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .errors import InvalidModulusError

# slack for comparisons involving log2 evaluated in floating point
LOG_SLACK = 1e-12


class Applicability(enum.Enum):
    NOT_APPLICABLE = "not-applicable"

    def __repr__(self) -> str:
        return "NOT_APPLICABLE"


NOT_APPLICABLE = Applicability.NOT_APPLICABLE


@dataclass(frozen=True)
class Factorization:
    modulus: int
    factors: tuple[tuple[int, int], ...]

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def prime_powers(self) -> tuple[int, ...]:
        return tuple(p**a for p, a in self.factors)

    @property
    def odd_primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors if p != 2)

    @property
    def is_squarefree(self) -> bool:
        return all(a == 1 for _, a in self.factors)

    @property
    def is_prime_power(self) -> bool:
        return self.omega == 1

    def recompose(self) -> int:
        return math.prod(p**a for p, a in self.factors)


def _check_modulus(ell) -> int:
    if isinstance(ell, bool) or not isinstance(ell, int) or ell < 2:
        raise InvalidModulusError(f"modulus must be an integer >= 2, got {ell!r}")
    return ell


def factorize(ell: int) -> Factorization:
    """Prime-power decomposition of ``ell`` by trial division."""
    m = _check_modulus(ell)
    factors = []
    q = 2
    while q * q <= m:
        if m % q == 0:
            a = 0
            while m % q == 0:
                m //= q
                a += 1
            factors.append((q, a))
        q += 1 if q == 2 else 2
    if m > 1:
        factors.append((m, 1))
    return Factorization(ell, tuple(factors))


def is_prime(p: int) -> bool:
    if isinstance(p, bool) or not isinstance(p, int) or p < 2:
        return False
    return factorize(p).factors == ((p, 1),)


def epsilon_of(ell: int) -> Fraction:
    """(1/20) * sum of p**-2 over the odd primes of ``ell`` bar the smallest."""
    odd = factorize(ell).odd_primes
    if len(odd) < 2:
        return Fraction(0)
    return Fraction(1, 20) * sum((Fraction(1, p * p) for p in odd[1:]), Fraction(0))


def log2_exact(n: int) -> int | float:
    """log2(n), as an int when n is a power of two."""
    if n >= 1 and n & (n - 1) == 0:
        return n.bit_length() - 1
    return math.log2(n)


def _as_number(x):
    # collapse integral Fractions so exact bounds print as integers
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


@dataclass(frozen=True)
class BoundReport:
    modulus: int
    n: int
    omega: int
    trivial: int
    szegedy: object
    thm11: object
    thm12: object
    epsilon: Fraction

    def applicable(self) -> dict[str, object]:
        out = {}
        for name in ("trivial", "szegedy", "thm11", "thm12"):
            value = getattr(self, name)
            if value is not NOT_APPLICABLE:
                out[name] = value
        return out


def bound_table(ell: int, n: int) -> BoundReport:
    """Evaluate the trivial, square-free, 2-omega and epsilon-improved bounds.

    Logarithms are base 2.  Values are exact (int / Fraction) when ``n`` is
    a power of two and floats otherwise.  The square-free bound is only
    reported for square-free moduli with at least two prime factors.
    """
    fac = factorize(ell)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InvalidModulusError(f"n must be a positive integer, got {n!r}")
    w = fac.omega
    lg = log2_exact(n)
    eps = epsilon_of(ell)
    trivial = w * n

    szegedy = NOT_APPLICABLE
    if fac.is_squarefree and w >= 2:
        szegedy = _as_number(w * n - w * lg)

    thm11 = NOT_APPLICABLE
    if w >= 2:
        thm11 = _as_number(w * n - 2 * w * lg + 11)

    thm12 = NOT_APPLICABLE
    if len(fac.odd_primes) >= 2:
        if isinstance(lg, int):
            thm12 = _as_number(w * n - (2 * w + eps) * lg)
        else:
            thm12 = w * n - (2 * w + float(eps)) * lg

    return BoundReport(ell, n, w, trivial, szegedy, thm11, thm12, eps)


def binary_entropy(q) -> float:
    """Base-2 binary entropy, with H(0) = H(1) = 0."""
    if isinstance(q, Rational):
        q = Fraction(q)
    if not 0 <= q <= 1:
        raise ValueError(f"entropy argument must lie in [0, 1], got {q}")
    if q == 0 or q == 1:
        return 0.0
    q = float(q)
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)

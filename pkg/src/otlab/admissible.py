"""sigma-admissible column submatrices over F_p.

A matrix is sigma-admissible when every nonzero frequency xi has
sum_i centered(<r_i, xi>)**2 strictly above sigma.  The sums are integers,
so "> sigma" is "> floor(sigma)" exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from . import kernels
from .budget import check_budget, get_budget
from .errors import BudgetExceededError, DomainError, DuplicateColumnsError
from .modlinalg import ModMatrix, has_distinct_columns
from .numtheory import LOG_SLACK, binary_entropy, is_prime


def _as_sigma(sigma) -> Fraction:
    if isinstance(sigma, float):
        return Fraction(sigma).limit_denominator(10**9)
    if isinstance(sigma, (Rational, int, str)):
        return Fraction(sigma)
    raise DomainError(f"sigma must be rational, got {sigma!r}")


def is_admissible(S: ModMatrix, sigma, budget: int | None = None) -> bool:
    """Exhaustive check over every nonzero xi in F_p^c."""
    p = S.modulus
    check_budget("spectrum", p**S.cols, budget)
    thr = math.floor(_as_sigma(sigma))
    return kernels.first_low_sigma(S.entries, p, thr) < 0


def _extends(S_entries, p: int, thr: int) -> bool:
    # S without its last column is already admissible, so only xi with a
    # nonzero last coordinate can fail
    return kernels.first_low_sigma(S_entries, p, thr, last_nonzero=True) < 0


@dataclass(frozen=True)
class AdmissibleResult:
    column_indices: list[int]
    c_prime: int
    sigma: Fraction
    bound: float


def lemma42_bound(c: int, d: int, sigma, p: int) -> float:
    """(1/log p)(log c - sigma - (sigma+d) H(sigma/(sigma+d))) - 1, logs base 2."""
    s = _as_sigma(sigma)
    if c < 1 or d < 1 or s < 0:
        raise DomainError("need c >= 1, d >= 1, sigma >= 0")
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    h = binary_entropy(s / (s + d))
    return (math.log2(c) - float(s) - float(s + d) * h) / math.log2(p) - 1


def greedy_admissible_submatrix(L: ModMatrix, sigma, budget: int | None = None) -> AdmissibleResult:
    """First-fit maximal sigma-admissible column submatrix of ``L``.

    Columns are scanned in input order and kept iff the enlarged matrix
    stays admissible.  Admissibility and maximality of the result are then
    re-verified exhaustively, and its width is checked against
    :func:`lemma42_bound`.
    """
    p = L.modulus
    if not is_prime(p):
        raise DomainError(f"matrix modulus {p} is not prime")
    if not has_distinct_columns(L):
        raise DuplicateColumnsError("matrix columns must be distinct")
    s = _as_sigma(sigma)
    thr = math.floor(s)
    limit = get_budget("spectrum") if budget is None else budget
    E = L.entries
    chosen: list[int] = []
    for j in range(L.cols):
        trial = chosen + [j]
        if p ** len(trial) > limit:
            raise BudgetExceededError(f"admissibility scan over {p}**{len(trial)} frequencies exceeds budget {limit}")
        if _extends(E[:, trial], p, thr):
            chosen = trial
    S = L.columns(chosen)
    assert is_admissible(S, s, limit), "greedy output is not admissible"
    if len(chosen) < L.cols and p ** (len(chosen) + 1) > limit:
        raise BudgetExceededError(f"maximality check over {p}**{len(chosen) + 1} frequencies exceeds budget {limit}")
    for j in range(L.cols):
        if j not in chosen:
            assert not is_admissible(L.columns(chosen + [j]), s, limit), f"column {j} could be added"
    bound = lemma42_bound(L.cols, L.rows, s, p) if L.cols and L.rows else -math.inf
    assert len(chosen) >= bound - LOG_SLACK, f"c'={len(chosen)} below bound {bound}"
    return AdmissibleResult(chosen, len(chosen), s, bound)


def count_bounded_square_sum(d: int, sigma, budget: int | None = None) -> int:
    """Number of integer vectors x in Z^d with sum x_i**2 <= sigma (brute force).

    Also checks the count against 2**sigma * C(floor(sigma) + d, d).
    """
    s = _as_sigma(sigma)
    if d < 0:
        raise DomainError("d must be >= 0")
    if s < 0:
        return 0
    fs = math.floor(s)
    r = math.isqrt(fs)
    check_budget("squares", (2 * r + 1) ** d, budget)
    rng = range(-r, r + 1)
    count = sum(1 for x in itertools.product(rng, repeat=d) if sum(v * v for v in x) <= s)
    binom = math.comb(fs + d, d)
    if s.denominator == 1:
        assert count <= 2**fs * binom
    else:
        assert math.log2(count) <= float(s) + math.log2(binom) + LOG_SLACK
    return count

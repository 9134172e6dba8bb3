"""Set families modulo l: verification, splitting by prime powers, certificates."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InvalidFamilyError
from .modlinalg import ModMatrix, rank_mod_p
from .numtheory import BoundReport, bound_table, factorize


def _popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class SetFamily:
    """Distinct subsets of [n] stored as bitmasks (element j is bit j-1).

    Sets are kept sorted by bitmask so equal families compare equal.
    """

    n: int
    sets: tuple[int, ...]

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 0:
            raise InvalidFamilyError(f"ground-set size must be a non-negative integer, got {self.n!r}")
        masks = tuple(sorted(int(s) for s in self.sets))
        full = (1 << self.n) - 1
        for s in masks:
            if s < 0 or s & ~full:
                raise InvalidFamilyError(f"set {_mask_to_list(s)} is not a subset of [{self.n}]")
        if len(set(masks)) != len(masks):
            raise InvalidFamilyError("family contains duplicate sets")
        object.__setattr__(self, "sets", masks)

    @classmethod
    def from_lists(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        masks = []
        for s in sets:
            m = 0
            for x in s:
                if isinstance(x, bool) or not isinstance(x, int) or not 1 <= x <= n:
                    raise InvalidFamilyError(f"element {x!r} outside [1, {n}]")
                if m >> (x - 1) & 1:
                    raise InvalidFamilyError(f"element {x} repeated in a set")
                m |= 1 << (x - 1)
            masks.append(m)
        return cls(n, tuple(masks))

    def to_lists(self) -> list[list[int]]:
        return [_mask_to_list(s) for s in self.sets]

    def sizes(self) -> list[int]:
        return [_popcount(s) for s in self.sets]

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)


def _mask_to_list(s: int) -> list[int]:
    out = []
    j = 1
    while s:
        if s & 1:
            out.append(j)
        s >>= 1
        j += 1
    return out


def singleton_family(n: int) -> SetFamily:
    if n < 1:
        raise DomainError("n must be >= 1")
    return SetFamily(n, tuple(1 << j for j in range(n)))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    valid: bool
    reason: str | None = None
    witness: tuple[list[int], ...] | None = None

    def __bool__(self) -> bool:
        return self.valid


def verify_family(F: SetFamily, ell: int) -> Verdict:
    """Check sizes are nonzero and pairwise intersections zero modulo ``ell``."""
    factorize(ell)  # validates the modulus
    for s in F.sets:
        if _popcount(s) % ell == 0:
            return Verdict(False, f"|A| = {_popcount(s)} is divisible by {ell}", (_mask_to_list(s),))
    for a, b in combinations(F.sets, 2):
        k = _popcount(a & b)
        if k % ell:
            return Verdict(
                False,
                f"|A & B| = {k} is not divisible by {ell}",
                (_mask_to_list(a), _mask_to_list(b)),
            )
    return Verdict(True)


def split(F: SetFamily, ell: int, i: int) -> tuple[SetFamily, SetFamily]:
    """Sets whose size is / is not divisible by the i-th prime power of ``ell``.

    Returns ``(A_i, A_i_prime)``: ``A_i`` holds sizes *not* divisible.
    """
    fac = factorize(ell)
    if isinstance(i, bool) or not isinstance(i, int) or not 0 <= i < fac.omega:
        raise DomainError(f"prime index {i!r} out of range for {ell} (omega={fac.omega})")
    q = fac.prime_powers[i]
    keep = tuple(s for s in F.sets if _popcount(s) % q)
    rest = tuple(s for s in F.sets if _popcount(s) % q == 0)
    return SetFamily(F.n, keep), SetFamily(F.n, rest)


def incidence_matrix(F: SetFamily, modulus: int = 2) -> ModMatrix:
    """|F| x n 0-1 matrix of characteristic vectors, in the family's set order."""
    rows = np.zeros((len(F), F.n), dtype=np.int64)
    for r, s in enumerate(F.sets):
        for j in range(F.n):
            rows[r, j] = (s >> j) & 1
    return ModMatrix(rows, modulus)


def dedup_columns(M: ModMatrix) -> tuple[ModMatrix, list[list[int]]]:
    """Drop repeated columns, keeping the first of each class in order."""
    first: dict[bytes, int] = {}
    classes: list[list[int]] = []
    A = np.ascontiguousarray(M.entries.T)
    for j in range(M.cols):
        key = A[j].tobytes()
        if key in first:
            classes[first[key]].append(j)
        else:
            first[key] = len(classes)
            classes.append([j])
    Mp = M.columns([c[0] for c in classes])
    fac = factorize(M.modulus)
    if fac.omega == 1:
        p = fac.primes[0]
        assert rank_mod_p(Mp, p) == rank_mod_p(M, p)
    return Mp, classes


@dataclass(frozen=True)
class PrimeClass:
    p: int
    distinct_columns: int
    threshold: float
    good: bool


def classify_primes(F: SetFamily, ell: int) -> dict[int, PrimeClass]:
    """Good/bad label for each odd prime of ``ell``.

    Good means the incidence matrix of the divisible part has at least
    ``n**0.4`` distinct columns.
    """
    fac = factorize(ell)
    out = {}
    threshold = F.n**0.4
    for i, p in enumerate(fac.primes):
        if p == 2:
            continue
        _, rest = split(F, ell, i)
        cols = _distinct_column_count(rest)
        out[p] = PrimeClass(p, cols, threshold, cols >= threshold)
    return out


def _distinct_column_count(F: SetFamily) -> int:
    if len(F) == 0:
        return 0
    return len(_membership_classes(F))


def _membership_classes(F: SetFamily) -> dict[int, list[int]]:
    # element j (0-based) -> bitmask of the sets containing it; group by that
    groups: dict[int, list[int]] = {}
    for j in range(F.n):
        key = 0
        for r, s in enumerate(F.sets):
            if s >> j & 1:
                key |= 1 << r
        groups.setdefault(key, []).append(j)
    return groups


def support_reduce(F: SetFamily, ell: int) -> SetFamily:
    """Delete ell-blocks of ground elements that lie in exactly the same sets.

    Each class of identically-placed elements keeps its first
    ``len(class) % ell`` members.  Labels and ``n`` are unchanged; deleted
    elements simply leave every set.
    """
    factorize(ell)
    drop = 0
    for members in _membership_classes(F).values():
        k = len(members) - len(members) % ell
        for j in members[len(members) - k :]:
            drop |= 1 << j
    new_sets = [s & ~drop for s in F.sets]
    if len(set(new_sets)) != len(new_sets):
        raise InvalidFamilyError("support reduction merged two sets; input is not an Oddtown")
    G = SetFamily(F.n, tuple(new_sets))
    for a, b in zip(F.sets, new_sets):
        assert _popcount(a) % ell == _popcount(b) % ell
    for (a1, b1), (a2, b2) in combinations(list(zip(F.sets, new_sets)), 2):
        assert _popcount(a1 & a2) % ell == _popcount(b1 & b2) % ell
    return G


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class PrimeRecord:
    p: int
    alpha: int
    size_A_i: int
    size_A_i_prime: int
    dim: int
    distinct_columns: int
    prime_power_ok: bool
    eq3_ok: bool
    eq4_ok: bool
    good: bool | None = None
    cases: dict[str, bool] | None = None


@dataclass(frozen=True)
class BadPairRecord:
    p1: int
    p2: int
    intersection: int  # |A_j1 & A_j2|
    largest_class_p1: int  # largest set of identical columns of M_j1
    largest_common_class: int  # identical in both M_j1 and M_j2


@dataclass(frozen=True)
class BoundCheck:
    bound: object
    holds: bool
    asymptotic: bool = False


@dataclass(frozen=True)
class Certificate:
    modulus: int
    n: int
    size: int
    factors: tuple[tuple[int, int], ...]
    primes: tuple[PrimeRecord, ...]
    bad_prime_lemma: tuple[BadPairRecord, ...]
    bounds: dict[str, BoundCheck] = field(default_factory=dict)

    @property
    def all_ok(self) -> bool:
        per_prime = all(r.prime_power_ok and r.eq3_ok and r.eq4_ok for r in self.primes)
        proven = all(c.holds for c in self.bounds.values() if not c.asymptotic)
        return per_prime and proven


def _prime_record(F: SetFamily, ell: int, i: int, p: int, alpha: int) -> PrimeRecord:
    A_i, A_ip = split(F, ell, i)
    n = F.n
    M = incidence_matrix(A_ip, p)
    dim = rank_mod_p(M, p) if len(A_ip) else 0
    slack = n - len(A_i)
    eq3 = 2 * dim <= slack
    # |A_i'| <= 2**(slack/2)  <=>  |A_i'|**2 <= 2**slack
    if slack >= 0:
        eq4 = len(A_ip) ** 2 <= 2**slack
    else:
        eq4 = Fraction(len(A_ip) ** 2) <= Fraction(1, 2**-slack)
    cols = _distinct_column_count(A_ip)
    good = cases = None
    if p != 2:
        good = cols >= n**0.4
        lg_size = math.log2(len(A_ip)) if len(A_ip) else -math.inf
        cases = {
            "small_rank": dim <= 36 * math.log2(p),
            "main_lemma": dim >= (1 + 1 / (36 * p * p)) * (lg_size - 2),
            "many_columns": n > 0 and dim >= 1.2 * math.log2(n),
        }
    return PrimeRecord(
        p=p,
        alpha=alpha,
        size_A_i=len(A_i),
        size_A_i_prime=len(A_ip),
        dim=dim,
        distinct_columns=cols,
        prime_power_ok=len(A_i) <= n,
        eq3_ok=eq3,
        eq4_ok=eq4,
        good=good,
        cases=cases,
    )


def _bad_pair(F: SetFamily, ell: int, i1: int, i2: int, p1: int, p2: int) -> BadPairRecord:
    A1, A1p = split(F, ell, i1)
    A2, A2p = split(F, ell, i2)
    inter = len(set(A1.sets) & set(A2.sets))
    cls1 = _membership_classes(A1p)
    largest1 = max((len(v) for v in cls1.values()), default=0)
    both = SetFamily(F.n, tuple(set(A1p.sets) | set(A2p.sets)))
    common = max((len(v) for v in _membership_classes(both).values()), default=0)
    return BadPairRecord(p1, p2, inter, largest1, common)


def certify(F: SetFamily, ell: int, threads: int = 1) -> Certificate:
    """Instantiate every per-prime inequality and every bound on ``F``.

    ``F`` must be a valid ell-Oddtown; otherwise InvalidFamilyError carries
    the witness from :func:`verify_family`.
    """
    verdict = verify_family(F, ell)
    if not verdict.valid:
        raise InvalidFamilyError(f"not a {ell}-Oddtown: {verdict.reason}; witness {verdict.witness}")
    fac = factorize(ell)
    jobs = [(F, ell, i, p, a) for i, (p, a) in enumerate(fac.factors)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            records = list(pool.map(lambda args: _prime_record(*args), jobs))
    else:
        records = [_prime_record(*args) for args in jobs]

    bad = [(i, r.p) for i, r in enumerate(records) if r.good is False]
    pairs = tuple(_bad_pair(F, ell, i1, i2, p1, p2) for (i1, p1), (i2, p2) in combinations(bad, 2))

    checks = {}
    if F.n >= 1:
        table: BoundReport = bound_table(ell, F.n)
        for name, value in table.applicable().items():
            checks[name] = BoundCheck(value, len(F) <= value, asymptotic=(name == "thm12"))
    return Certificate(
        modulus=ell,
        n=F.n,
        size=len(F),
        factors=fac.factors,
        primes=tuple(records),
        bad_prime_lemma=pairs,
        bounds=checks,
    )


# ---------------------------------------------------------------------------
# family JSON: {"n": <int>, "sets": [[1-based elements], ...]}


def family_to_json(F: SetFamily) -> dict:
    return {"n": F.n, "sets": F.to_lists()}


def family_from_json(obj) -> SetFamily:
    if not isinstance(obj, dict) or "n" not in obj or "sets" not in obj:
        raise InvalidFamilyError('family JSON must be {"n": int, "sets": [[...], ...]}')
    if not isinstance(obj["sets"], list) or not all(isinstance(s, list) for s in obj["sets"]):
        raise InvalidFamilyError('"sets" must be a list of lists')
    return SetFamily.from_lists(obj["n"], obj["sets"])


def read_family(path: str | Path) -> SetFamily:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidFamilyError(f"{path}: {exc}") from None
    return family_from_json(obj)


def write_family(F: SetFamily, path: str | Path) -> None:
    Path(path).write_text(json.dumps(family_to_json(F)) + "\n")


def family_from_masks(n: int, masks: Sequence[int]) -> SetFamily:
    return SetFamily(n, tuple(masks))

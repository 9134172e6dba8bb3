"""Exact linear algebra over F_p and Z/p^a Z.

Matrices are int64 numpy arrays with every entry reduced into ``[0, m)``.
Inner products for the orthogonality lemma are taken over Python integers,
so those checks are exact for entries of any size.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .budget import check_budget, get_budget
from .errors import BudgetExceededError, DomainError, InvalidInstanceError
from .numtheory import factorize, is_prime


@dataclass(frozen=True, eq=False)
class ModMatrix:
    """Immutable integer matrix reduced modulo ``modulus``."""

    entries: np.ndarray
    modulus: int

    def __post_init__(self):
        m = self.modulus
        if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 2:
            raise DomainError(f"modulus must be >= 2, got {m!r}")
        if m > kernels.MAX_KERNEL_MODULUS:
            raise DomainError(f"modulus {m} too large for int64 kernels")
        arr = np.array(self.entries, dtype=np.int64)
        if arr.ndim != 2:
            if arr.size == 0:
                arr = arr.reshape(0, 0)
            else:
                raise DomainError("matrix entries must be two-dimensional")
        arr = np.mod(arr, int(m))
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "modulus", int(m))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], modulus: int, cols: int | None = None) -> "ModMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(np.zeros((0, cols or 0), dtype=np.int64), modulus)
        # reduce via Python ints first so huge entries never overflow int64
        return cls(np.array([[x % modulus for x in r] for r in rows], dtype=np.int64), modulus)

    @classmethod
    def zeros(cls, rows: int, cols: int, modulus: int) -> "ModMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), modulus)

    @classmethod
    def identity(cls, n: int, modulus: int) -> "ModMatrix":
        return cls(np.eye(n, dtype=np.int64), modulus)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def T(self) -> "ModMatrix":
        return ModMatrix(self.entries.T, self.modulus)

    def to_lists(self) -> list[list[int]]:
        return self.entries.tolist()

    def is_01(self) -> bool:
        return bool(np.all(self.entries <= 1))

    def columns(self, idx: Sequence[int]) -> "ModMatrix":
        return ModMatrix(self.entries[:, list(idx)].reshape(self.rows, len(idx)), self.modulus)

    def __eq__(self, other):
        if not isinstance(other, ModMatrix):
            return NotImplemented
        return self.modulus == other.modulus and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.modulus, self.entries.shape, self.entries.tobytes()))

    def __repr__(self):
        return f"ModMatrix({self.to_lists()!r}, modulus={self.modulus})"


def _check_prime(p: int) -> int:
    if not is_prime(p):
        raise DomainError(f"{p!r} is not prime")
    return int(p)


def _as_mod_p(M: ModMatrix, p: int) -> np.ndarray:
    if M.modulus % p != 0 and M.rows and M.cols and int(M.entries.max()) >= p:
        raise DomainError(f"entries modulo {M.modulus} have no meaning modulo {p}")
    return M.entries


def rank_mod_p(M: ModMatrix, p: int) -> int:
    """Row rank of ``M`` over F_p by exact Gaussian elimination."""
    p = _check_prime(p)
    _, pivots = kernels.rref(_as_mod_p(M, p), p)
    return len(pivots)


def rref_mod_p(M: ModMatrix, p: int) -> tuple[ModMatrix, list[int]]:
    """Reduced row echelon form over F_p and the pivot columns.

    Pivots are the first nonzero entry scanning columns left to right and
    rows top to bottom.
    """
    p = _check_prime(p)
    R, pivots = kernels.rref(_as_mod_p(M, p), p)
    return ModMatrix(R, p), [int(c) for c in pivots]


def count_01_in_rowspace(M: ModMatrix, p: int, budget: int | None = None) -> int:
    """Count the 0-1 vectors in the F_p row space of ``M`` by full enumeration.

    All ``p**rank`` vectors of the row space are generated, so this is an
    independent check on the ``2**rank`` bound rather than a use of it.
    """
    p = _check_prime(p)
    R, pivots = kernels.rref(_as_mod_p(M, p), p)
    d = len(pivots)
    limit = get_budget("rowspace") if budget is None else budget
    if p**d > limit:
        raise BudgetExceededError(f"row space has {p}**{d} vectors > budget {limit}")
    count = kernels.count01(R[:d], p)
    assert count <= 2**d, f"0-1 count {count} exceeds 2**{d}"
    return count


# ---------------------------------------------------------------------------
# orthogonality lemma over Z/p^a Z


def _dot(x: Sequence[int], y: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(x, y))


@dataclass(frozen=True)
class OrthoInstance:
    p: int
    alpha: int
    n: int
    U: tuple[tuple[int, ...], ...]
    V: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "U", tuple(tuple(int(x) for x in u) for u in self.U))
        object.__setattr__(self, "V", tuple(tuple(int(x) for x in v) for v in self.V))

    @property
    def k(self) -> int:
        return self.n - len(self.U)

    @property
    def q(self) -> int:
        return self.p**self.alpha

    def violations(self) -> list[str]:
        """Every violated shape or congruence condition, as readable strings."""
        out = []
        if not is_prime(self.p):
            out.append(f"p={self.p} is not prime")
        if self.alpha < 1:
            out.append(f"alpha={self.alpha} < 1")
        if out:
            return out
        if len(self.U) > self.n:
            out.append(f"|U|={len(self.U)} > n={self.n}")
        for name, vecs in (("u", self.U), ("v", self.V)):
            for i, x in enumerate(vecs):
                if len(x) != self.n:
                    out.append(f"{name}_{i + 1} has length {len(x)} != n={self.n}")
        if out:
            return out
        q = self.q
        for i, u in enumerate(self.U):
            if _dot(u, u) % q == 0:
                out.append(f"u_{i + 1}.u_{i + 1} = 0 mod {q}")
            for j in range(i + 1, len(self.U)):
                if _dot(u, self.U[j]) % q:
                    out.append(f"u_{i + 1}.u_{j + 1} != 0 mod {q}")
        for i, v in enumerate(self.V):
            for j in range(i, len(self.V)):
                if _dot(v, self.V[j]) % q:
                    out.append(f"v_{i + 1}.v_{j + 1} != 0 mod {q}")
        for i, u in enumerate(self.U):
            for j, v in enumerate(self.V):
                if _dot(u, v) % q:
                    out.append(f"u_{i + 1}.v_{j + 1} != 0 mod {q}")
        return out

    def validate(self) -> None:
        bad = self.violations()
        if bad:
            raise InvalidInstanceError("; ".join(bad))


@dataclass(frozen=True)
class Lemma21Result:
    dim: int
    k: int
    holds: bool


def lemma21_verify(inst: OrthoInstance) -> Lemma21Result:
    """Dimension of span{v_j mod p} against k/2, where k = n - |U|."""
    inst.validate()
    if inst.V:
        dim = rank_mod_p(ModMatrix.from_rows(inst.V, inst.p), inst.p)
    else:
        dim = 0
    return Lemma21Result(dim, inst.k, 2 * dim <= inst.k)


@dataclass(frozen=True)
class NormalizedOrtho:
    """Instance after the basis/elimination normalisation.

    ``coords`` are the coordinates on which the kept v's are the identity;
    ``U_rest``/``V_rest`` are the projections onto the other coordinates.
    """

    q: int
    basis_indices: list[int]
    coords: list[int]
    U: list[list[int]]
    V: list[list[int]]
    U_rest: list[list[int]] = field(repr=False)
    V_rest: list[list[int]] = field(repr=False)


def normalize_ortho(inst: OrthoInstance) -> NormalizedOrtho:
    """Normalise an instance using only the three congruence-preserving moves.

    Adding or subtracting a v vector, multiplying by a unit and adding a
    multiple of ``p**alpha`` keep every condition intact.  Elimination over
    Z/p^a Z with unit pivots is a sequence of those moves.
    """
    inst.validate()
    p, q, n = inst.p, inst.q, inst.n
    # keep a subset of V that is a basis mod p
    kept: list[int] = []
    rank = 0
    for j, v in enumerate(inst.V):
        trial = [inst.V[i] for i in kept] + [v]
        r = rank_mod_p(ModMatrix.from_rows(trial, p), p)
        if r > rank:
            kept.append(j)
            rank = r
    V = [[x % q for x in inst.V[j]] for j in kept]
    U = [[x % q for x in u] for u in inst.U]
    m = len(V)
    coords: list[int] = []
    if m:
        _, coords = rref_mod_p(ModMatrix.from_rows(V, p), p)
    for s, col in enumerate(coords):
        piv = next(r for r in range(s, m) if V[r][col] % p)
        V[s], V[piv] = V[piv], V[s]
        inv = pow(V[s][col], -1, q)
        V[s] = [x * inv % q for x in V[s]]
        for r in range(m):
            if r != s and V[r][col]:
                f = V[r][col]
                V[r] = [(x - f * y) % q for x, y in zip(V[r], V[s])]
    for i, u in enumerate(U):
        for s, col in enumerate(coords):
            f = u[col]
            if f:
                u = [(x - f * y) % q for x, y in zip(u, V[s])]
        U[i] = u
    rest = [j for j in range(n) if j not in set(coords)]
    return NormalizedOrtho(
        q=q,
        basis_indices=kept,
        coords=list(coords),
        U=U,
        V=V,
        U_rest=[[u[j] for j in rest] for u in U],
        V_rest=[[v[j] for j in rest] for v in V],
    )


# ---------------------------------------------------------------------------
# row-space normalisation of 0-1 matrices


def row_space_normalize(M: ModMatrix, p: int) -> tuple[ModMatrix, list[int]]:
    """Basis ``L`` of the row space that is the identity on ``pivot_cols``.

    Every row of a 0-1 matrix ``M`` is then ``v^T L`` with ``v`` the row
    restricted to the pivot columns, which is a 0-1 vector.
    """
    p = _check_prime(p)
    if not M.is_01():
        raise DomainError("row_space_normalize needs a 0-1 matrix")
    A = M.entries
    if len({row.tobytes() for row in A}) != M.rows:
        raise DomainError("matrix has duplicate rows")
    R, pivots = kernels.rref(A, p)
    d = len(pivots)
    L = R[:d]
    pivots = [int(c) for c in pivots]
    assert np.array_equal(L[:, pivots], np.eye(d, dtype=np.int64))
    recon = (A[:, pivots] @ L) % p
    assert np.array_equal(recon, A % p), "row not a 0-1 combination of the basis"
    if _distinct_columns(A):
        assert _distinct_columns(L), "row operations merged distinct columns"
    return ModMatrix(L.reshape(d, M.cols), p), pivots


def _distinct_columns(A: np.ndarray) -> bool:
    return len({col.tobytes() for col in np.ascontiguousarray(A.T)}) == A.shape[1]


def _distinct_rows(A: np.ndarray) -> bool:
    return len({row.tobytes() for row in np.ascontiguousarray(A)}) == A.shape[0]


def has_distinct_columns(M: ModMatrix) -> bool:
    return _distinct_columns(M.entries)


def has_distinct_rows(M: ModMatrix) -> bool:
    return _distinct_rows(M.entries)


# ---------------------------------------------------------------------------
# constructions


def all_columns_matrix(n: int, modulus: int = 2, budget: int | None = None) -> ModMatrix:
    """n x 2**n 0-1 matrix whose columns list {0,1}^n lexicographically."""
    if n < 1:
        raise DomainError("n must be >= 1")
    check_budget("matrix", n * 2**n, budget)
    cols = np.arange(2**n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ModMatrix((cols[None, :] >> shifts[:, None]) & 1, modulus)


def block_construction(
    a: int,
    b: int,
    modulus: int = 2,
    verify_primes: Sequence[int] = (2, 3, 5),
    budget: int | None = None,
) -> ModMatrix:
    """(2**a + b) x (a + 2**b) block matrix diag(M_a^T, M_b) of rank a + b."""
    if a < 1 or b < 1:
        raise DomainError("a and b must be >= 1")
    r, c = 2**a + b, a + 2**b
    check_budget("matrix", r * c, budget)
    out = np.zeros((r, c), dtype=np.int64)
    out[: 2**a, :a] = all_columns_matrix(a, budget=budget).entries.T
    out[2**a :, a:] = all_columns_matrix(b, budget=budget).entries
    assert _distinct_rows(out) and _distinct_columns(out)
    M = ModMatrix(out, modulus)
    for p in verify_primes:
        assert rank_mod_p(M, p) == a + b, f"rank over F_{p} is not {a + b}"
    return M


# ---------------------------------------------------------------------------
# matrix CSV: "# mod m rows r cols c" then one comma-separated row per line


def format_matrix_csv(M: ModMatrix) -> str:
    buf = io.StringIO()
    buf.write(f"# mod {M.modulus} rows {M.rows} cols {M.cols}\n")
    for row in M.entries:
        buf.write(",".join(str(int(x)) for x in row) + "\n")
    return buf.getvalue()


def parse_matrix_csv(text: str) -> ModMatrix:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise DomainError("matrix CSV must start with '# mod m rows r cols c'")
    tokens = lines[0].lstrip("#").split()
    try:
        meta = dict(zip(tokens[0::2], (int(t) for t in tokens[1::2])))
        m, r, c = meta["mod"], meta["rows"], meta["cols"]
    except (KeyError, ValueError):
        raise DomainError(f"bad matrix CSV header: {lines[0]!r}") from None
    body = [[int(x) for x in ln.split(",")] for ln in lines[1:]]
    if len(body) != r or any(len(row) != c for row in body):
        raise DomainError(f"matrix CSV body does not match header {r}x{c}")
    if any(not 0 <= x < m for row in body for x in row):
        raise DomainError(f"matrix CSV entries must lie in [0, {m})")
    return ModMatrix.from_rows(body, m, cols=c)


def read_matrix_csv(path: str | Path) -> ModMatrix:
    return parse_matrix_csv(Path(path).read_text())


def write_matrix_csv(M: ModMatrix, path: str | Path) -> None:
    Path(path).write_text(format_matrix_csv(M))


def prime_of_modulus(m: int) -> int:
    """The prime p when m is a power of p."""
    fac = factorize(m)
    if fac.omega != 1:
        raise DomainError(f"{m} is not a prime power")
    return fac.primes[0]

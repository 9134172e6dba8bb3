"""Random instance generators used by tests, the acceptance suite and the CLI.

Every generator takes a ``numpy.random.Generator`` so runs are reproducible
from a seed.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .modlinalg import ModMatrix, OrthoInstance
from .numtheory import factorize
from .oddtown import SetFamily, verify_family


def _popcount(x: int) -> int:
    return bin(x).count("1")


# ---------------------------------------------------------------------------
# l-Oddtown families


def greedy_clique_family(rng: np.random.Generator, n: int, ell: int, tries: int = 400) -> list[int]:
    """Random maximal-ish family: propose random sets, keep compatible ones."""
    fam: list[int] = []
    for _ in range(tries):
        size = int(rng.integers(1, n + 1))
        if size % ell == 0:
            continue
        s = 0
        for j in rng.choice(n, size=size, replace=False):
            s |= 1 << int(j)
        if s in fam:
            continue
        if all(_popcount(s & t) % ell == 0 for t in fam):
            fam.append(s)
    return fam


def _blow_up(fam: list[int], m: int, factor: int) -> list[int]:
    # element j becomes the block {factor*j, ..., factor*j + factor - 1}
    out = []
    block = (1 << factor) - 1
    for s in fam:
        t = 0
        for j in range(m):
            if s >> j & 1:
                t |= block << (factor * j)
        out.append(t)
    return out


def _disjoint_blocks(rng, n: int, ell: int) -> list[int]:
    fam, pos = [], 0
    while pos < n:
        size = int(rng.integers(1, min(n - pos, 2 * ell) + 1))
        if size % ell == 0:
            size -= 1
        if size == 0:
            break
        fam.append(((1 << size) - 1) << pos)
        pos += size
    return fam


def _typed_family(rng, n: int, ell: int) -> list[int]:
    """Sets sharing whole ell-blocks plus private elements to fix sizes."""
    m = int(rng.integers(2, 6))
    sets = [0] * m
    pos = 0
    for _ in range(int(rng.integers(0, 4))):
        if pos + ell > n - m:
            break
        members = [i for i in range(m) if rng.random() < 0.5]
        block = ((1 << ell) - 1) << pos
        pos += ell
        for i in members:
            sets[i] |= block
    for i in range(m):
        extra = int(rng.integers(1, 3))
        if _popcount(sets[i]) % ell == 0 or rng.random() < 0.5:
            for _ in range(extra):
                if pos >= n:
                    break
                sets[i] |= 1 << pos
                pos += 1
    return [s for s in sets if s and _popcount(s) % ell]


def _prime_power_blowups(rng, n: int, ell: int) -> list[int]:
    """Take a q-Oddtown for a prime power q || ell and inflate by ell/q."""
    fac = factorize(ell)
    q = int(rng.choice(fac.prime_powers))
    factor = ell // q
    m = n // factor
    if m < 1:
        return []
    base = greedy_clique_family(rng, m, q, tries=60)
    return _blow_up(base, m, factor)


def random_oddtown(rng: np.random.Generator, n: int, ell: int) -> SetFamily:
    """A valid ell-Oddtown on [n] mixing several constructions.

    Parts are placed on disjoint stretches of the ground set, optionally
    glued pairwise (A | B stays valid when the sizes allow), and the ground
    set is randomly permuted.
    """
    while True:
        parts: list[list[int]] = []
        pos = 0
        while pos < n:
            room = n - pos
            width = int(rng.integers(1, room + 1))
            kind = int(rng.integers(0, 5))
            if kind == 4:
                fam = [1 << j for j in range(width)]
            elif kind == 0:
                fam = _disjoint_blocks(rng, width, ell)
            elif kind == 1:
                fam = _typed_family(rng, width, ell)
            elif kind == 2:
                fam = _prime_power_blowups(rng, width, ell)
            else:
                fam = greedy_clique_family(rng, width, ell, tries=100)
            parts.append([s << pos for s in fam])
            pos += width
        sets = [s for part in parts for s in part]
        # glue a few pairs from different parts
        if len(parts) >= 2 and rng.random() < 0.5:
            for _ in range(int(rng.integers(1, 4))):
                i, j = rng.choice(len(parts), size=2, replace=False)
                if parts[i] and parts[j]:
                    a = parts[i][int(rng.integers(len(parts[i])))]
                    b = parts[j][int(rng.integers(len(parts[j])))]
                    if a in sets and b in sets and _popcount(a | b) % ell:
                        sets.remove(a)
                        sets.remove(b)
                        sets.append(a | b)
        perm = rng.permutation(n)
        out = []
        for s in sets:
            t = 0
            for j in range(n):
                if s >> j & 1:
                    t |= 1 << int(perm[j])
            out.append(t)
        if len(set(out)) != len(out):
            continue
        F = SetFamily(n, tuple(out))
        if verify_family(F, ell).valid:
            return F


# ---------------------------------------------------------------------------
# orthogonality-lemma instances


def _null_norm_blocks(p: int, alpha: int) -> list[list[int]]:
    """Short integer vectors, nonzero mod p, with v.v = 0 mod p**alpha."""
    q = p**alpha
    found = []
    for length in range(1, 5):
        for x in np.ndindex(*(min(q, 6),) * length):
            x = list(x)
            if any(t % p for t in x) and sum(t * t for t in x) % q == 0:
                found.append(x)
        if len(found) >= 4:
            break
    if not found:
        # q ones always work
        found.append([1] * q)
    return found


def random_ortho_instance(rng: np.random.Generator, p: int, alpha: int) -> OrthoInstance:
    """Random instance satisfying all four congruence conditions.

    U-vectors and V-blocks live on disjoint coordinates, then the
    condition-preserving moves (add a v, scale by a unit, add p**alpha w)
    and a signed coordinate permutation scramble them.
    """
    q = p**alpha
    blocks = _null_norm_blocks(p, alpha)
    U: list[list[int]] = []
    V: list[list[int]] = []
    pieces: list[tuple[str, list[int]]] = []
    for _ in range(int(rng.integers(0, 4))):
        pieces.append(("v", list(blocks[int(rng.integers(len(blocks)))])))
    for _ in range(int(rng.integers(0, 5))):
        while True:
            u = [int(t) for t in rng.integers(-3, 4, size=int(rng.integers(1, 3)))]
            if sum(t * t for t in u) % q:
                break
        pieces.append(("u", u))
    free = int(rng.integers(0, 3))
    n = sum(len(x) for _, x in pieces) + free
    if n == 0:
        n = 1
    pos = 0
    for kind, x in pieces:
        vec = [0] * n
        vec[pos : pos + len(x)] = x
        pos += len(x)
        (V if kind == "v" else U).append(vec)
    # dependent copies of V vectors
    for _ in range(int(rng.integers(0, 3))):
        if V:
            a = V[int(rng.integers(len(V)))]
            b = V[int(rng.integers(len(V)))]
            V.append([x + y for x, y in zip(a, b)])
    units = [u for u in range(1, q) if u % p]
    for _ in range(int(rng.integers(0, 6))):
        move = int(rng.integers(0, 3))
        pool = U + V
        if not pool:
            break
        target = pool[int(rng.integers(len(pool)))]
        if move == 0 and V:
            v = V[int(rng.integers(len(V)))]
            if v is target:
                continue
            sign = 1 if rng.random() < 0.5 else -1
            target[:] = [x + sign * y for x, y in zip(target, v)]
        elif move == 1:
            c = int(rng.choice(units))
            target[:] = [c * x for x in target]
        else:
            w = rng.integers(-2, 3, size=n)
            target[:] = [x + q * int(y) for x, y in zip(target, w)]
    perm = rng.permutation(n)
    signs = rng.choice([-1, 1], size=n)
    shuffle = lambda vec: [int(signs[j]) * vec[int(perm[j])] for j in range(n)]
    inst = OrthoInstance(p, alpha, n, [shuffle(u) for u in U], [shuffle(v) for v in V])
    inst.validate()
    return inst


# ---------------------------------------------------------------------------
# matrices


def random_distinct_column_matrix(rng: np.random.Generator, p: int, d: int, c: int) -> ModMatrix:
    """d x c matrix over F_p with distinct columns (requires c <= p**d)."""
    if c > p**d:
        raise DomainError(f"cannot pick {c} distinct columns from F_{p}^{d}")
    idx = rng.choice(p**d, size=c, replace=False)
    cols = [[(int(i) // p**k) % p for k in range(d)] for i in idx]
    return ModMatrix(np.array(cols, dtype=np.int64).T.reshape(d, c), p)


def random_01_matrix(rng: np.random.Generator, r: int, c: int, modulus: int = 2) -> ModMatrix:
    return ModMatrix(rng.integers(0, 2, size=(r, c)), modulus)

"""Hot inner loops, each in two flavours.

``*_nb`` functions are numba-compiled loops; ``*_np`` functions are the
vectorised numpy (or, for the clique search, plain Python) fallbacks.  The
un-suffixed names dispatch on :func:`otlab._accel.backend`.  Both flavours
must return identical results; ``tests/test_kernels.py`` checks this.

All arithmetic is on int64 with the modulus below 2**31, so products of two
reduced residues never overflow.
"""

from __future__ import annotations

import numpy as np

from . import _accel
from ._accel import njit

MAX_KERNEL_MODULUS = 2**31 - 1
_CHUNK = 1 << 15


def _use_numba() -> bool:
    return _accel.backend() == "numba"


# ---------------------------------------------------------------------------
# modular helpers


@njit(cache=True)
def _inv_mod_nb(a, p):
    # Fermat inverse, p prime
    result = 1
    base = a % p
    e = p - 2
    while e > 0:
        if e & 1:
            result = result * base % p
        base = base * base % p
        e >>= 1
    return result


@njit(cache=True)
def _centered_nb(k, p):
    k = k % p
    if 2 * k > p:
        return k - p
    return k


def centered_np(k, p):
    """Representative of ``k mod p`` in (-p/2, p/2]; works on arrays."""
    k = np.mod(k, p)
    return np.where(2 * k > p, k - p, k)


# ---------------------------------------------------------------------------
# reduced row echelon form over F_p


@njit(cache=True)
def _rref_nb(A, p):
    R = A.copy()
    r, c = R.shape
    for i in range(r):
        for j in range(c):
            R[i, j] = R[i, j] % p
    pivots = np.empty(min(r, c), np.int64)
    row = 0
    k = 0
    for col in range(c):
        if row >= r:
            break
        piv = -1
        for i in range(row, r):
            if R[i, col] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != row:
            for j in range(c):
                t = R[row, j]
                R[row, j] = R[piv, j]
                R[piv, j] = t
        inv = _inv_mod_nb(R[row, col], p)
        for j in range(c):
            R[row, j] = R[row, j] * inv % p
        for i in range(r):
            f = R[i, col]
            if i != row and f != 0:
                for j in range(col, c):
                    R[i, j] = (R[i, j] + p - f * R[row, j] % p) % p
        pivots[k] = col
        k += 1
        row += 1
    return R, pivots[:k].copy()


def _rref_np(A, p):
    R = np.mod(np.array(A, dtype=np.int64), p)
    r, c = R.shape
    pivots = []
    row = 0
    for col in range(c):
        if row >= r:
            break
        nz = np.flatnonzero(R[row:, col])
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            R[[row, piv]] = R[[piv, row]]
        inv = pow(int(R[row, col]), p - 2, p)
        R[row] = R[row] * inv % p
        f = R[:, col].copy()
        f[row] = 0
        R = np.mod(R - np.outer(f, R[row]) % p, p)
        pivots.append(col)
        row += 1
    return R, np.array(pivots, dtype=np.int64)


def rref(A: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    A = np.ascontiguousarray(A, dtype=np.int64)
    if A.shape[0] == 0 or A.shape[1] == 0:
        return np.mod(A, p), np.zeros(0, dtype=np.int64)
    if _use_numba():
        return _rref_nb(A, np.int64(p))
    return _rref_np(A, p)


# ---------------------------------------------------------------------------
# 0-1 vectors in a row space, by full enumeration of p**d combinations


@njit(cache=True)
def _count01_nb(B, p):
    d, n = B.shape
    v = np.zeros(n, np.int64)
    digits = np.zeros(d, np.int64)
    count = 1  # zero vector
    while True:
        i = 0
        while i < d:
            for j in range(n):
                v[j] += B[i, j]
                if v[j] >= p:
                    v[j] -= p
            digits[i] += 1
            if digits[i] < p:
                break
            digits[i] = 0
            i += 1
        if i == d:
            break
        ok = True
        for j in range(n):
            if v[j] > 1:
                ok = False
                break
        if ok:
            count += 1
    return count


def _count01_np(B, p):
    d, n = B.shape
    total = p**d
    count = 0
    powers = p ** np.arange(d, dtype=np.int64)
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        coeff = (idx[:, None] // powers[None, :]) % p
        vecs = (coeff @ B) % p
        count += int(np.count_nonzero((vecs <= 1).all(axis=1)))
    return count


def count01(B: np.ndarray, p: int) -> int:
    """Number of 0-1 vectors among all F_p combinations of the rows of ``B``."""
    B = np.ascontiguousarray(np.mod(B, p), dtype=np.int64)
    if B.shape[0] == 0:
        return 1
    if B.shape[1] == 0:
        return 1
    if _use_numba():
        return int(_count01_nb(B, np.int64(p)))
    return _count01_np(B, p)


# ---------------------------------------------------------------------------
# distribution of L^T v for v uniform on {0,1}^d (counts out of 2**d)


@njit(cache=True)
def _pmf_counts_nb(L, p):
    d, c = L.shape
    size = 1
    for _ in range(c):
        size *= p
    weights = np.empty(c, np.int64)
    w = 1
    for j in range(c - 1, -1, -1):
        weights[j] = w
        w *= p
    counts = np.zeros(size, np.int64)
    x = np.zeros(c, np.int64)
    bits = np.zeros(d, np.int64)
    counts[0] += 1
    total = np.int64(1) << d
    for step in range(1, total):
        # Gray code: flip the lowest set bit position of step
        i = 0
        s = step
        while (s & 1) == 0:
            s >>= 1
            i += 1
        if bits[i] == 0:
            bits[i] = 1
            for j in range(c):
                x[j] = (x[j] + L[i, j]) % p
        else:
            bits[i] = 0
            for j in range(c):
                x[j] = (x[j] + p - L[i, j]) % p
        idx = 0
        for j in range(c):
            idx += x[j] * weights[j]
        counts[idx] += 1
    return counts


def _pmf_counts_np(L, p):
    d, c = L.shape
    weights = p ** np.arange(c - 1, -1, -1, dtype=np.int64)
    counts = np.zeros(p**c, dtype=np.int64)
    shifts = np.arange(d, dtype=np.int64)
    total = 1 << d
    for start in range(0, total, _CHUNK):
        v = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        bits = (v[:, None] >> shifts[None, :]) & 1
        x = (bits @ L) % p
        counts += np.bincount(x @ weights, minlength=p**c)
    return counts


def pmf_counts(L: np.ndarray, p: int) -> np.ndarray:
    """``counts[idx(x)] = #{v in {0,1}^d : L^T v = x}``, lexicographic index."""
    L = np.ascontiguousarray(np.mod(L, p), dtype=np.int64)
    d, c = L.shape
    if c == 0:
        return np.array([1 << d], dtype=np.int64)
    if d == 0:
        out = np.zeros(p**c, dtype=np.int64)
        out[0] = 1
        return out
    if _use_numba():
        return _pmf_counts_nb(L, np.int64(p))
    return _pmf_counts_np(L, p)


# ---------------------------------------------------------------------------
# direct-summation DFT on F_p^c of a finitely supported function


@njit(cache=True)
def _dft_nb(X, weights, p, c, sign):
    K = X.shape[0]
    size = 1
    for _ in range(c):
        size *= p
    cos_t = np.empty(p)
    sin_t = np.empty(p)
    for k in range(p):
        kc = _centered_nb(k, p)
        ang = sign * 2.0 * np.pi * kc / p
        cos_t[k] = np.cos(ang)
        sin_t[k] = np.sin(ang)
    out = np.empty(size, np.complex128)
    ip = np.zeros(K, np.int64)
    digits = np.zeros(c, np.int64)
    for t in range(size):
        re = 0.0
        im = 0.0
        for k in range(K):
            re += weights[k] * cos_t[ip[k]]
            im += weights[k] * sin_t[ip[k]]
        out[t] = complex(re, im)
        # lexicographic odometer, last coordinate fastest
        j = c - 1
        while j >= 0:
            for k in range(K):
                ip[k] += X[k, j]
                if ip[k] >= p:
                    ip[k] -= p
            digits[j] += 1
            if digits[j] < p:
                break
            digits[j] = 0
            j -= 1
    return out


def _dft_np(X, weights, p, c, sign):
    size = p**c
    table = np.exp(sign * 2j * np.pi * centered_np(np.arange(p), p) / p)
    powers = p ** np.arange(c - 1, -1, -1, dtype=np.int64)
    out = np.empty(size, dtype=np.complex128)
    for start in range(0, size, _CHUNK):
        idx = np.arange(start, min(size, start + _CHUNK), dtype=np.int64)
        xi = (idx[:, None] // powers[None, :]) % p
        ip = (xi @ X.T) % p
        out[start : start + idx.size] = table[ip] @ weights
    return out


def dft_support(X: np.ndarray, weights: np.ndarray, p: int, c: int, sign: int = -1) -> np.ndarray:
    """``out[idx(xi)] = sum_k weights[k] * exp(sign*2*pi*i*<X[k], xi>/p)``."""
    X = np.ascontiguousarray(np.mod(X, p), dtype=np.int64).reshape(-1, c)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    if c == 0:
        return np.array([weights.sum()], dtype=np.complex128)
    if _use_numba():
        return _dft_nb(X, weights, np.int64(p), c, float(sign))
    return _dft_np(X, weights, p, c, sign)


# ---------------------------------------------------------------------------
# sigma(xi) = sum_i centered(<r_i, xi>)**2 over all xi


@njit(cache=True)
def _sigma_all_nb(S, p):
    d, c = S.shape
    size = 1
    for _ in range(c):
        size *= p
    out = np.empty(size, np.int64)
    ip = np.zeros(d, np.int64)
    digits = np.zeros(c, np.int64)
    for t in range(size):
        s = 0
        for i in range(d):
            v = _centered_nb(ip[i], p)
            s += v * v
        out[t] = s
        j = c - 1
        while j >= 0:
            for i in range(d):
                ip[i] += S[i, j]
                if ip[i] >= p:
                    ip[i] -= p
            digits[j] += 1
            if digits[j] < p:
                break
            digits[j] = 0
            j -= 1
    return out


def _sigma_all_np(S, p):
    d, c = S.shape
    size = p**c
    powers = p ** np.arange(c - 1, -1, -1, dtype=np.int64)
    out = np.empty(size, dtype=np.int64)
    for start in range(0, size, _CHUNK):
        idx = np.arange(start, min(size, start + _CHUNK), dtype=np.int64)
        xi = (idx[:, None] // powers[None, :]) % p
        ip = centered_np(xi @ S.T, p)
        out[start : start + idx.size] = (ip * ip).sum(axis=1)
    return out


def sigma_all(S: np.ndarray, p: int) -> np.ndarray:
    S = np.ascontiguousarray(np.mod(S, p), dtype=np.int64)
    d, c = S.shape
    if c == 0:
        return np.zeros(1, dtype=np.int64)
    if _use_numba():
        return _sigma_all_nb(S, np.int64(p))
    return _sigma_all_np(S, p)


@njit(cache=True)
def _first_low_sigma_nb(S, p, threshold, last_nonzero):
    d, c = S.shape
    size = 1
    for _ in range(c):
        size *= p
    ip = np.zeros(d, np.int64)
    digits = np.zeros(c, np.int64)
    for t in range(size):
        if t > 0 and (not last_nonzero or digits[c - 1] != 0):
            s = 0
            for i in range(d):
                v = _centered_nb(ip[i], p)
                s += v * v
            if s <= threshold:
                return t
        j = c - 1
        while j >= 0:
            for i in range(d):
                ip[i] += S[i, j]
                if ip[i] >= p:
                    ip[i] -= p
            digits[j] += 1
            if digits[j] < p:
                break
            digits[j] = 0
            j -= 1
    return -1


def _first_low_sigma_np(S, p, threshold, last_nonzero):
    d, c = S.shape
    size = p**c
    powers = p ** np.arange(c - 1, -1, -1, dtype=np.int64)
    for start in range(0, size, _CHUNK):
        idx = np.arange(start, min(size, start + _CHUNK), dtype=np.int64)
        xi = (idx[:, None] // powers[None, :]) % p
        ip = centered_np(xi @ S.T, p)
        low = (ip * ip).sum(axis=1) <= threshold
        low &= idx != 0
        if last_nonzero:
            low &= xi[:, c - 1] != 0
        hits = np.flatnonzero(low)
        if hits.size:
            return int(idx[hits[0]])
    return -1


def first_low_sigma(S: np.ndarray, p: int, threshold: int, last_nonzero: bool = False) -> int:
    """Lexicographic index of the first nonzero xi with sigma(xi) <= threshold, or -1.

    With ``last_nonzero`` only frequencies whose last coordinate is nonzero
    are scanned.
    """
    S = np.ascontiguousarray(np.mod(S, p), dtype=np.int64)
    if S.shape[1] == 0:
        return -1
    if _use_numba():
        return int(_first_low_sigma_nb(S, np.int64(p), np.int64(threshold), bool(last_nonzero)))
    return _first_low_sigma_np(S, p, threshold, last_nonzero)


# ---------------------------------------------------------------------------
# maximum clique: branch and bound with greedy colouring bounds on bitsets


@njit(cache=True)
def _ctz64(w):
    n = 0
    if (w & np.uint64(0xFFFFFFFF)) == 0:
        n += 32
        w >>= np.uint64(32)
    if (w & np.uint64(0xFFFF)) == 0:
        n += 16
        w >>= np.uint64(16)
    if (w & np.uint64(0xFF)) == 0:
        n += 8
        w >>= np.uint64(8)
    if (w & np.uint64(0xF)) == 0:
        n += 4
        w >>= np.uint64(4)
    if (w & np.uint64(0x3)) == 0:
        n += 2
        w >>= np.uint64(2)
    if (w & np.uint64(0x1)) == 0:
        n += 1
    return n


@njit(cache=True)
def _colour_sort_nb(adj, P, order, colours):
    W = P.shape[0]
    Q = P.copy()
    R = np.empty(W, np.uint64)
    cnt = 0
    k = 0
    one = np.uint64(1)
    while True:
        nonempty = False
        for w in range(W):
            if Q[w] != 0:
                nonempty = True
                break
        if not nonempty:
            break
        k += 1
        for w in range(W):
            R[w] = Q[w]
        w = 0
        while w < W:
            if R[w] == 0:
                w += 1
                continue
            b = _ctz64(R[w])
            v = w * 64 + b
            mask = ~(one << np.uint64(b))
            R[w] &= mask
            Q[w] &= mask
            for u in range(W):
                R[u] &= ~adj[v, u]
            order[cnt] = v
            colours[cnt] = k
            cnt += 1
    return cnt


@njit(cache=True, nogil=True)
def _max_clique_nb(adj, start, P0, shared, ties, node_budget):
    V = adj.shape[0]
    W = adj.shape[1]
    depth_max = V + 1
    Ps = np.zeros((depth_max, W), np.uint64)
    orders = np.zeros((depth_max, V), np.int64)
    colours = np.zeros((depth_max, V), np.int64)
    pos = np.zeros(depth_max, np.int64)
    clique = np.zeros(V + start.shape[0] + 1, np.int64)
    best = np.zeros(V + start.shape[0] + 1, np.int64)
    for i in range(start.shape[0]):
        clique[i] = start[i]
    base = start.shape[0]
    size = base
    best_size = -1
    nodes = 0
    exhausted = True
    one = np.uint64(1)

    for w in range(W):
        Ps[0, w] = P0[w]
    empty0 = True
    for w in range(W):
        if P0[w] != 0:
            empty0 = False
    if empty0:
        if base > shared[0] or (ties and base >= shared[0]):
            best_size = base
            for i in range(base):
                best[i] = clique[i]
        return best[: max(best_size, 0)].copy(), best_size, nodes, exhausted
    pos[0] = _colour_sort_nb(adj, Ps[0], orders[0], colours[0]) - 1
    t = 0
    while t >= 0:
        if pos[t] < 0:
            # frame finished: pop and remove the vertex chosen one level up
            t -= 1
            if t >= 0:
                size -= 1
                v = orders[t, pos[t]]
                Ps[t, v >> 6] &= ~(one << np.uint64(v & 63))
                pos[t] -= 1
            continue
        # threshold: prune unless the colour bound can reach it
        inc = shared[0]
        if best_size > inc:
            inc = best_size
        if ties and best_size < shared[0]:
            need = inc  # may equal the incumbent
        else:
            need = inc + 1
        if size + colours[t, pos[t]] < need:
            pos[t] = -1
            continue
        if nodes >= node_budget:
            exhausted = False
            break
        nodes += 1
        v = orders[t, pos[t]]
        clique[size] = v
        size += 1
        nonempty = False
        for w in range(W):
            Ps[t + 1, w] = Ps[t, w] & adj[v, w]
            if Ps[t + 1, w] != 0:
                nonempty = True
        if nonempty:
            t += 1
            pos[t] = _colour_sort_nb(adj, Ps[t], orders[t], colours[t]) - 1
        else:
            if size >= need:
                best_size = size
                for i in range(size):
                    best[i] = clique[i]
                if size > shared[0]:
                    shared[0] = size
            size -= 1
            Ps[t, v >> 6] &= ~(one << np.uint64(v & 63))
            pos[t] -= 1
    return best[: max(best_size, 0)].copy(), best_size, nodes, exhausted


def _colour_sort_py(adj, P):
    order, colours = [], []
    Q = P
    k = 0
    while Q:
        k += 1
        R = Q
        while R:
            low = R & -R
            v = low.bit_length() - 1
            R &= ~low
            Q &= ~low
            R &= ~adj[v]
            order.append(v)
            colours.append(k)
    return order, colours


class _PyClique:
    def __init__(self, adj, shared, ties, node_budget):
        self.adj = adj
        self.shared = shared
        self.ties = ties
        self.node_budget = node_budget
        self.best: list[int] | None = None
        self.best_size = -1
        self.nodes = 0
        self.exhausted = True

    def _need(self):
        inc = max(self.best_size, int(self.shared[0]))
        if self.ties and self.best_size < self.shared[0]:
            return inc
        return inc + 1

    def expand(self, clique, P):
        order, colours = _colour_sort_py(self.adj, P)
        for i in range(len(order) - 1, -1, -1):
            if len(clique) + colours[i] < self._need():
                return True
            if self.nodes >= self.node_budget:
                self.exhausted = False
                return False
            self.nodes += 1
            v = order[i]
            clique.append(v)
            newP = P & self.adj[v]
            if newP:
                if not self.expand(clique, newP):
                    return False
            elif len(clique) >= self._need():
                self.best = list(clique)
                self.best_size = len(clique)
                if self.best_size > self.shared[0]:
                    self.shared[0] = self.best_size
            clique.pop()
            P &= ~(1 << v)
        return True


def _words_to_int(words) -> int:
    out = 0
    for i, w in enumerate(words):
        out |= int(w) << (64 * i)
    return out


def max_clique(adj_words, start, P_words, shared, ties, node_budget):
    """Branch-and-bound search below the partial clique ``start``.

    ``adj_words`` is a (V, W) uint64 bitset adjacency matrix, ``P_words``
    the candidate set.  ``shared`` is a length-1 int64 array holding the
    incumbent size seen across workers; it is raised when a larger clique
    is found.  With ``ties`` a clique equal in size to the incumbent is
    still recorded.  Returns ``(clique, size, nodes, exhausted)`` where
    ``size == -1`` means nothing reaching the threshold was found.
    """
    start = np.asarray(start, dtype=np.int64)
    if _use_numba():
        best, size, nodes, exhausted = _max_clique_nb(
            adj_words, start, np.asarray(P_words, dtype=np.uint64), shared,
            bool(ties), np.int64(node_budget),
        )
        return [int(v) for v in best], int(size), int(nodes), bool(exhausted)
    adj = [_words_to_int(row) for row in adj_words]
    P = _words_to_int(P_words)
    search = _PyClique(adj, shared, ties, node_budget)
    clique = [int(v) for v in start]
    if P == 0:
        if len(clique) > shared[0] or (ties and len(clique) >= shared[0]):
            return clique, len(clique), 0, True
        return [], -1, 0, True
    search.expand(clique, P)
    best = search.best if search.best is not None else []
    return best, search.best_size, search.nodes, search.exhausted


def colour_sort(adj_words, P_words) -> tuple[list[int], list[int]]:
    """Greedy colouring used at every search node (root exposed for workers)."""
    adj = [_words_to_int(row) for row in adj_words]
    return _colour_sort_py(adj, _words_to_int(P_words))

"""Exact f_l(n) for small n: maximum clique in the compatibility graph.

Vertices are the subsets of [n] whose size is not divisible by l; two are
adjacent when their intersection size is.  l-Oddtowns are exactly the
cliques.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .budget import check_budget, get_budget
from .errors import DomainError
from .numtheory import factorize
from .oddtown import SetFamily, verify_family

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CompatibilityGraph:
    n: int
    ell: int
    vertices: np.ndarray  # set bitmasks, search order
    adjacency: np.ndarray  # (V, W) uint64 bitsets over vertex positions

    @property
    def order(self) -> int:
        return len(self.vertices)

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.adjacency[i, j >> 6] >> np.uint64(j & 63) & np.uint64(1))

    def edges(self) -> list[tuple[int, int]]:
        """Edges as pairs of set bitmasks, each pair listed once (smaller first)."""
        out = []
        for i in range(self.order):
            for j in range(i + 1, self.order):
                if self.has_edge(i, j):
                    a, b = int(self.vertices[i]), int(self.vertices[j])
                    out.append((min(a, b), max(a, b)))
        return sorted(out)

    def degree(self, i: int) -> int:
        return sum(bin(int(w)).count("1") for w in self.adjacency[i])


def _popcounts(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.int64)
    out = np.zeros_like(x)
    while x.any():
        out += x & 1
        x >>= 1
    return out


def build_graph(n: int, ell: int, budget: int | None = None) -> CompatibilityGraph:
    """Compatibility graph with vertices ordered by degree (desc), then bitmask."""
    factorize(ell)
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    check_budget("graph", 2**n, budget)
    masks = np.arange(1, 2**n, dtype=np.int64)
    masks = masks[_popcounts(masks) % ell != 0]
    V = len(masks)
    compat = _popcounts(masks[:, None] & masks[None, :]) % ell == 0
    np.fill_diagonal(compat, False)
    deg = compat.sum(axis=1)
    perm = np.lexsort((masks, -deg))
    masks = masks[perm]
    compat = compat[np.ix_(perm, perm)]
    W = max(1, (V + 63) // 64)
    padded = np.zeros((V, W * 64), dtype=bool)
    padded[:, :V] = compat
    bits = padded.reshape(V, W, 64).astype(np.uint64) << np.arange(64, dtype=np.uint64)
    adjacency = np.bitwise_or.reduce(bits, axis=2) if V else np.zeros((0, W), dtype=np.uint64)
    return CompatibilityGraph(n, ell, masks, np.ascontiguousarray(adjacency, dtype=np.uint64))


@dataclass(frozen=True)
class SolveResult:
    n: int
    ell: int
    max_size: int
    witness: SetFamily
    optimal: bool
    nodes_explored: int
    wall_time: float


def _all_words(V: int, W: int) -> np.ndarray:
    words = np.zeros(W, dtype=np.uint64)
    for v in range(V):
        words[v >> 6] |= np.uint64(1) << np.uint64(v & 63)
    return words


def max_oddtown(n: int, ell: int, budget: int | None = None, threads: int = 1) -> SolveResult:
    """Largest l-Oddtown on [n] by branch and bound with colouring bounds.

    The witness is the first maximum clique in depth-first order, so it does
    not depend on ``threads``.  When the node budget runs out the best
    family found so far is returned with ``optimal=False``.
    """
    t0 = time.perf_counter()
    node_budget = get_budget("solver_nodes") if budget is None else budget
    G = build_graph(n, ell)
    V, W = G.adjacency.shape if G.order else (0, 1)
    if V == 0:
        return SolveResult(n, ell, 0, SetFamily(n, ()), True, 0, time.perf_counter() - t0)
    P = _all_words(V, W)
    shared = np.zeros(1, dtype=np.int64)

    if threads <= 1:
        clique, size, nodes, exhausted = kernels.max_clique(G.adjacency, [], P, shared, False, node_budget)
    else:
        clique, size, nodes, exhausted = _parallel_search(G, P, shared, node_budget, threads)

    witness = SetFamily(n, tuple(int(G.vertices[v]) for v in clique))
    verdict = verify_family(witness, ell)
    assert verdict.valid, f"solver produced an invalid family: {verdict.reason}"
    elapsed = time.perf_counter() - t0
    if not exhausted:
        log.warning("node budget %d exhausted for n=%d, ell=%d; best %d", node_budget, n, ell, size)
    return SolveResult(n, ell, len(witness), witness, exhausted, nodes, elapsed)


def _parallel_search(G, P, shared, node_budget, threads):
    """Distribute the root's branches; ties are kept so the merge is order-free."""
    order, colours = kernels.colour_sort(G.adjacency, P)
    tasks = []
    remaining = P.copy()
    for idx in range(len(order) - 1, -1, -1):
        v = order[idx]
        cand = remaining & G.adjacency[v]
        tasks.append((idx, v, cand.copy(), colours[idx]))
        remaining[v >> 6] &= ~(np.uint64(1) << np.uint64(v & 63))

    per_task = max(1, node_budget // max(1, len(tasks)))

    def run(task):
        idx, v, cand, colour = task
        if colour < shared[0]:
            return idx, [], -1, 0, True
        return (idx, *kernels.max_clique(G.adjacency, [v], cand, shared, True, per_task))

    with ThreadPoolExecutor(threads) as pool:
        results = list(pool.map(run, tasks))
    nodes = sum(r[3] for r in results)
    exhausted = all(r[4] for r in results)
    best_size = max(r[2] for r in results)
    # tasks are in depth-first order already; first one reaching the max wins
    for _, clique, size, _, _ in results:
        if size == best_size:
            return clique, size, nodes + len(tasks), exhausted
    return [], 0, nodes, exhausted


def naive_max_oddtown(n: int, ell: int) -> int:
    """Independent oracle: test every family of candidate sets (tiny n only)."""
    cands = [s for s in range(1, 2**n) if bin(s).count("1") % ell]
    if len(cands) > 20:
        raise DomainError("naive oracle is limited to at most 20 candidate sets")
    best = 0
    for choice in range(1, 2 ** len(cands)):
        fam = [cands[i] for i in range(len(cands)) if choice >> i & 1]
        if len(fam) <= best:
            continue
        if all(bin(a & b).count("1") % ell == 0 for i, a in enumerate(fam) for b in fam[i + 1 :]):
            best = len(fam)
    return best

"""Points (log r / d, log c / d) achieved by 0-1 matrices with distinct rows and columns."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .budget import check_budget
from .modlinalg import ModMatrix, block_construction, rank_mod_p


@dataclass(frozen=True, order=True)
class RegionPoint:
    kind: str  # "enumerated" | "sampled" | "construction"
    r: int
    c: int
    d: int

    @property
    def x(self) -> float:
        return math.log2(self.r) / self.d

    @property
    def y(self) -> float:
        return math.log2(self.c) / self.d


def _row_bits(c: int) -> np.ndarray:
    idx = np.arange(2**c, dtype=np.int64)
    return (idx[:, None] >> np.arange(c - 1, -1, -1, dtype=np.int64)[None, :]) & 1


def figure_region_scan(
    max_r: int,
    max_c: int,
    p: int,
    sampled: bool = False,
    samples: int = 2000,
    seed: int = 0,
    max_block: int = 3,
    budget: int | None = None,
) -> list[RegionPoint]:
    """Distinct (r, c, rank) triples over F_p, plus block-construction points.

    Exhaustive mode walks every set of ``r`` distinct rows in {0,1}^c (row
    order does not affect rank) and keeps those with distinct columns.
    Matrices of rank 0 have no defined point and are skipped.
    """
    found: set[RegionPoint] = set()
    rng = np.random.default_rng(seed)
    for c in range(1, max_c + 1):
        pool = _row_bits(c)
        for r in range(1, min(max_r, 2**c) + 1):
            if sampled:
                picks = (tuple(sorted(rng.choice(2**c, size=r, replace=False))) for _ in range(samples))
                kind = "sampled"
            else:
                check_budget("pmf", math.comb(2**c, r), budget)
                picks = combinations(range(2**c), r)
                kind = "enumerated"
            for rows in picks:
                A = pool[list(rows)]
                if len({col.tobytes() for col in np.ascontiguousarray(A.T)}) != c:
                    continue
                d = rank_mod_p(ModMatrix(A, p), p)
                if d:
                    found.add(RegionPoint(kind, r, c, d))
    for a in range(1, max_block + 1):
        for b in range(1, max_block + 1):
            M = block_construction(a, b, verify_primes=())
            found.add(RegionPoint("construction", M.rows, M.cols, rank_mod_p(M, p)))
    return sorted(found)


def region_csv(points: list[RegionPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "r", "c", "d", "x", "y"])
    for pt in points:
        w.writerow([pt.kind, pt.r, pt.c, pt.d, repr(pt.x), repr(pt.y)])
    return buf.getvalue()

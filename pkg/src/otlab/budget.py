"""Enumeration budgets.

``OTLAB_BUDGET`` (an integer) overrides every default budget at once.
"""

from __future__ import annotations

import os

from .errors import BudgetExceededError

DEFAULTS = {
    "rowspace": 10**7,   # p**rank vectors enumerated by count_01_in_rowspace
    "pmf": 2**24,        # 2**d assignments enumerated by pmf_of_linear_image
    "spectrum": 10**6,   # p**c frequencies in dft / admissibility scans
    "matrix": 10**6,     # entries of constructed matrices
    "graph": 2**20,      # candidate sets in the compatibility graph
    "squares": 10**7,    # lattice points scanned by count_bounded_square_sum
    "solver_nodes": 10**8,
}


def get_budget(name: str) -> int:
    env = os.environ.get("OTLAB_BUDGET")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"OTLAB_BUDGET must be an integer, got {env!r}") from None
        if value <= 0:
            raise ValueError("OTLAB_BUDGET must be positive")
        return value
    return DEFAULTS[name]


def check_budget(name: str, needed: int, budget: int | None = None) -> None:
    limit = get_budget(name) if budget is None else budget
    if needed > limit:
        raise BudgetExceededError(f"{name}: need {needed} > budget {limit}")

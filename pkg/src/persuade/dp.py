"""Grid dynamic program for optimal partitional policies, plus a brute-force
oracle over the same grid.

The DP fills, for every budget k and grid point x_j, the best value
achievable on [0, x_j] with at most k intervals whose endpoints are grid
points.  Both the DP and the oracle draw interval values from one shared
table and accumulate them left to right, so their optima agree exactly in
floating point, not merely within a tolerance.

The table fill is the hot loop (O(K n^2) for n grid points).  A compiled
kernel is used when the extension built; a numpy fallback with identical
semantics is selected at import otherwise.  Set ``PERSUADE_DP_BACKEND=numpy``
to force the fallback.
"""

from __future__ import annotations

import itertools
import math
import os

import numpy as np

from .exceptions import BudgetExceededError, DomainError
from .grids import DpGrid
from .measures import Instance
from .policies import PartitionalPolicy

_ZERO_MASS = 1e-15

if os.environ.get("PERSUADE_DP_BACKEND") == "numpy":
    from ._dp_numpy import dp_fill as _dp_fill
    _BACKEND = "numpy"
else:
    try:
        from ._dp_core import dp_fill as _dp_fill
        _BACKEND = "compiled"
    except ImportError:
        from ._dp_numpy import dp_fill as _dp_fill
        _BACKEND = "numpy"


def dp_backend() -> str:
    """Which table-fill kernel import selected: 'compiled' or 'numpy'."""
    return _BACKEND


def interval_value_table(instance: Instance, grid: DpGrid) -> np.ndarray:
    """w[i, j] = prior mass of cell [x_i, x_j) times utility at its mean.

    Cells are left-closed; the terminal column also covers 1 itself, so an
    atom at 1 lands in the final cell.  Zero-mass cells contribute 0; the
    lower triangle and diagonal are -inf so the table doubles as the
    transition matrix of the DP.
    """
    pts = np.asarray(grid.points)
    n = pts.size
    p0, p1 = instance.prior.prefix_tables(pts)
    mass = np.maximum(p0[None, :] - p0[:, None], 0.0)
    moment = p1[None, :] - p1[:, None]
    alive = mass > _ZERO_MASS
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(alive, moment / np.where(alive, mass, 1.0), 0.0)
    mean = np.clip(mean, np.minimum(pts[:, None], pts[None, :]),
                   np.maximum(pts[:, None], pts[None, :]))
    uvals = instance.utility.eval_array(mean.ravel()).reshape(n, n)
    w = np.where(alive, mass * uvals, 0.0)
    w[np.tril_indices(n)] = -np.inf
    return np.ascontiguousarray(w)


def _reconstruct_cuts(grid: DpGrid, choices: np.ndarray, budget: int):
    j = len(grid.points) - 1
    k = budget
    cut_idx = []
    while j > 0:
        a = int(choices[k, j])
        if a == -2:
            raise AssertionError("unreachable DP state during backtracking")
        if a == -1:
            k -= 1
            continue
        if a > 0:
            cut_idx.append(a)
        j = a
        k -= 1
    return tuple(grid.points[i] for i in sorted(cut_idx))


def solve_partitional_dp(instance: Instance, budget: int, grid: DpGrid):
    """Best partitional policy with cuts restricted to the grid.

    Returns ``(policy, value)``; the policy uses at most ``budget - 1`` cuts
    and is exactly optimal among grid-cut policies.
    """
    if budget < 1:
        raise DomainError(f"signal budget must be at least 1, got {budget}")
    w = interval_value_table(instance, grid)
    values, choices = _dp_fill(w, budget)
    value = float(values[budget, -1])
    cuts = _reconstruct_cuts(grid, choices, budget)
    return PartitionalPolicy(cuts=cuts), value


def brute_force_partitional(instance: Instance, budget: int, grid: DpGrid) -> float:
    """Exhaustive maximum over all grid-cut subsets of size < ``budget``.

    Uses the same interval-value table as the DP and sums each candidate left
    to right, so on affordable grids the result equals the DP value exactly.
    """
    if budget < 1:
        raise DomainError(f"signal budget must be at least 1, got {budget}")
    n = len(grid.points)
    interior = range(1, n - 1)
    max_cuts = min(budget - 1, n - 2)
    count = sum(math.comb(n - 2, s) for s in range(max_cuts + 1))
    if count > 10**7:
        raise BudgetExceededError(
            f"{count} cut subsets exceed the 1e7 enumeration budget"
        )
    w = interval_value_table(instance, grid)
    best = -np.inf
    for size in range(max_cuts + 1):
        for combo in itertools.combinations(interior, size):
            idx = (0,) + combo + (n - 1,)
            value = 0.0
            for a, b in zip(idx, idx[1:]):
                value += w[a, b]
            if value > best:
                best = value
    return float(best)

"""Discretization grids for the interval-partition solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import DomainError, InfeasibleTargetError
from .measures import Instance, solve_right_endpoint

_MERGE_TOL = 1e-12

TAG_UNIFORM = "uniform"
TAG_BREAKPOINT = "breakpoint"
TAG_USER = "user"


@dataclass(frozen=True)
class DpGrid:
    """Sorted, deduplicated cut candidates in [0, 1] including both endpoints.

    ``tags`` records where each point came from (uniform grid, utility
    breakpoint, or user supplied); consecutive uniform points are at most
    ``epsilon`` apart.
    """

    points: tuple
    epsilon: float
    tags: tuple

    def __post_init__(self):
        pts = self.points
        if len(pts) < 2 or pts[0] != 0.0 or pts[-1] != 1.0:
            raise DomainError("grid must contain 0 and 1")
        if any(b - a <= 0.0 for a, b in zip(pts, pts[1:])):
            raise DomainError("grid points must be strictly increasing")
        if len(self.tags) != len(pts):
            raise DomainError("one tag set per grid point required")

    @staticmethod
    def from_tagged(tagged, epsilon: float) -> "DpGrid":
        """Merge (point, tag) pairs, unioning tags of near-coincident points."""
        tagged = sorted((float(p), t) for p, t in tagged)
        pts: list[float] = []
        tags: list[frozenset] = []
        for p, t in tagged:
            if pts and p - pts[-1] <= _MERGE_TOL:
                tags[-1] = tags[-1] | {t}
            else:
                pts.append(p)
                tags.append(frozenset({t}))
        return DpGrid(tuple(pts), float(epsilon), tuple(tags))

    @staticmethod
    def from_points(points, epsilon: float = 1.0, tag: str = TAG_USER) -> "DpGrid":
        tagged = [(p, tag) for p in points]
        tagged += [(0.0, TAG_UNIFORM), (1.0, TAG_UNIFORM)]
        return DpGrid.from_tagged(tagged, epsilon)

    def with_extra(self, points, tag: str = TAG_USER) -> "DpGrid":
        tagged = [(p, t) for p, ts in zip(self.points, self.tags) for t in ts]
        tagged += [(float(p), tag) for p in points]
        return DpGrid.from_tagged(tagged, self.epsilon)

    def user_points(self):
        return tuple(p for p, ts in zip(self.points, self.tags) if TAG_USER in ts)

    def __len__(self) -> int:
        return len(self.points)


def default_grid(instance: Instance, epsilon: float, extra=()) -> DpGrid:
    """Uniform epsilon-grid enriched with the utility's structure.

    Beyond the uniform points this adds base-segment breakpoints, spike
    locations, and for every spike the cut c with conditional mean of [0, c]
    equal to the spike (when reachable).  Spike payoffs live on measure-zero
    points, so a plain uniform grid would never realize them; the enrichment
    lets grid-restricted policies hit them exactly.
    """
    if not 0.0 < epsilon <= 1.0:
        raise DomainError(f"epsilon {epsilon} outside (0, 1]")
    steps = max(int(math.ceil(1.0 / epsilon)), 1)
    tagged = [(i / steps, TAG_UNIFORM) for i in range(steps + 1)]
    utility = instance.utility
    for b in utility.breakpoints:
        tagged.append((b, TAG_BREAKPOINT))
    for loc, _ in utility.spikes:
        tagged.append((loc, TAG_BREAKPOINT))
        if loc <= 0.0:
            continue
        try:
            cut = solve_right_endpoint(instance.prior, 0.0, loc)
        except InfeasibleTargetError:
            continue
        if 0.0 < cut <= 1.0:
            tagged.append((cut, TAG_BREAKPOINT))
    for p in extra:
        tagged.append((float(p), TAG_USER))
    return DpGrid.from_tagged(tagged, epsilon)

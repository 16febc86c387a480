"""Shared generators for the randomized test corpora.

Everything is seeded by the caller so failures reproduce; generators only
build objects that already satisfy the package's own validity checks.
"""

from __future__ import annotations

import numpy as np

from persuade import (
    BiPoolingPolicy,
    BiPoolingSegment,
    Instance,
    Utility,
    one_signal_segment,
    two_point_feasible,
)

SHRINKS = (1.0, 0.6, 0.3, 0.12, 0.05)


def rng_for(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_boundaries(rng: np.random.Generator, max_interior: int = 3):
    n = int(rng.integers(0, max_interior + 1))
    pts = np.sort(rng.uniform(0.08, 0.92, size=n))
    keep = [0.0]
    for p in pts:
        if p - keep[-1] >= 0.06:
            keep.append(float(p))
    if 1.0 - keep[-1] < 0.06:
        keep.pop()
    keep.append(1.0)
    return keep


def random_bipooling_policy(instance: Instance, rng: np.random.Generator,
                            max_interior: int = 3) -> BiPoolingPolicy:
    """Random valid bi-pooling policy; two-signal pairs are shrunk toward the
    interval mean until the majorization check accepts them."""
    prior = instance.prior
    bounds = random_boundaries(rng, max_interior)
    segments = []
    for left, right in zip(bounds, bounds[1:]):
        closed = right >= 1.0 - 1e-15
        if prior.mass(left, right, True, closed) <= 1e-12:
            segments.append(one_signal_segment(left, right))
            continue
        m = prior.mean(left, right, True, closed)
        if rng.random() < 0.45 or m - left < 1e-6 or right - m < 1e-6:
            segments.append(one_signal_segment(left, right))
            continue
        lo = float(rng.uniform(left, m))
        hi = float(rng.uniform(m, right))
        placed = False
        for t in SHRINKS:
            mu1 = m + t * (lo - m)
            mu2 = m + t * (hi - m)
            if m - mu1 < 1e-9 or mu2 - m < 1e-9:
                continue
            feasible, p1 = two_point_feasible(prior, left, right, mu1, mu2)
            if feasible:
                segments.append(BiPoolingSegment(left, right, mu1, mu2, p1))
                placed = True
                break
        if not placed:
            segments.append(one_signal_segment(left, right))
    return BiPoolingPolicy(tuple(segments))


def shaped_pl_utility(rng: np.random.Generator, convex: bool,
                      kink_step: float = 0.1) -> Utility:
    """Continuous piecewise-linear utility with sorted slopes (convex) or
    reverse-sorted slopes (concave); kinks stay on the coarse ``kink_step``
    lattice so they land on default solver grids."""
    candidates = np.arange(kink_step, 1.0, kink_step)
    count = int(rng.integers(1, min(4, len(candidates)) + 1))
    kinks = np.sort(rng.choice(candidates, size=count, replace=False))
    bounds = np.concatenate(([0.0], kinks, [1.0]))
    slopes = np.sort(rng.uniform(-3.0, 3.0, size=len(bounds) - 1))
    if not convex:
        slopes = slopes[::-1]
    values = [0.0]
    for (a, b), s in zip(zip(bounds, bounds[1:]), slopes):
        values.append(values[-1] + s * (b - a))
    values = np.asarray(values)
    values = values - values.min()
    peak = values.max()
    if peak > 1e-12:
        values = values / peak
    segs = tuple(
        (float(a), float(b), float(va), float(vb))
        for a, b, va, vb in zip(bounds, bounds[1:], values, values[1:])
    )
    return Utility(segs, (), lipschitz=None, ubound=1.0)

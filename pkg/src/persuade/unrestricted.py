"""Near-optimal unrestricted signaling as grid bi-pooling policies, and an
exact enumeration oracle for small atomic priors.

Optimal schemes with a bounded signal count can be taken to tile [0, 1] with
intervals carrying one or two signals each, so the solver searches exactly
that class: a dynamic program over grid boundaries where each interval either
pools to one signal or, when it strictly helps, carries the best feasible
two-signal pair found by :func:`best_two_signal`.

Two-signal posterior means are searched over spike locations, utility
breakpoints, and user grid points; infeasible pairs are repaired by sliding
one mean to the feasibility boundary, which coincides with the two posterior
means induced by cutting the interval (located with the conditional-mean root
solvers, no gap bisection needed).
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .dp import interval_value_table
from .exceptions import (
    BudgetExceededError,
    DegenerateIntervalError,
    DomainError,
    InfeasibleTargetError,
    SolverToleranceError,
)
from .grids import DpGrid
from .measures import (
    Instance,
    Prior,
    Utility,
    solve_left_endpoint,
    solve_right_endpoint,
)
from .policies import (
    MAJORIZATION_TOL,
    BiPoolingPolicy,
    BiPoolingSegment,
    majorization_gap,
    one_signal_segment,
)

_ZERO_MASS = 1e-15
_IMPROVEMENT_TOL = 1e-12


@dataclass(frozen=True)
class SegmentChoice:
    """Best two-signal assignment found for one candidate interval; ``value``
    is the conditional expected utility scaled by the interval mass."""

    left: float
    right: float
    mu1: float
    mu2: float
    p1: float
    value: float


def _cell_stats(prior: Prior, left: float, right: float):
    closed_right = right >= 1.0 - 1e-15
    mass = prior.mass(left, right, True, closed_right)
    if mass <= _ZERO_MASS:
        return 0.0, None
    moment = prior.moment(left, right, True, closed_right)
    return mass, min(max(moment / mass, left), right)


def _boundary_pair_low(prior, left, right, mu2):
    """Feasibility-boundary mu1 for a fixed mu2: the pair induced by cutting
    the interval at the point whose right part has mean mu2."""
    cut = solve_left_endpoint(prior, right, mu2)
    if not left < cut < right:
        raise InfeasibleTargetError("cut escaped the interval")
    return prior.mean(left, cut, True, False)


def _boundary_pair_high(prior, left, right, mu1):
    cut = solve_right_endpoint(prior, left, mu1)
    if not left < cut < right:
        raise InfeasibleTargetError("cut escaped the interval")
    closed = right >= 1.0 - 1e-15
    return prior.mean(cut, right, True, closed)


def best_two_signal(instance: Instance, left: float, right: float,
                    candidates) -> SegmentChoice | None:
    """Best feasible two-signal pair on [left, right) from the candidate
    means, or None when nothing strictly beats pooling to one signal.

    The conditional probability of the low signal is forced by the mean
    identity.  Pairs failing the majorization check are slid to the
    feasibility boundary (one side at a time) before being scored.
    """
    prior, u = instance.prior, instance.utility
    mass, m = _cell_stats(prior, left, right)
    if mass <= _ZERO_MASS:
        return None
    one_value = u.eval(m)
    lows = [c for c in candidates if left <= c < m - 1e-12]
    highs = [c for c in candidates if m + 1e-12 < c <= right]
    pairs = []
    seen = set()

    def note(mu1, mu2):
        key = (round(mu1, 15), round(mu2, 15))
        if key not in seen and mu1 < m < mu2:
            seen.add(key)
            pairs.append((mu1, mu2))

    for mu1 in lows:
        for mu2 in highs:
            note(mu1, mu2)
    best = None
    best_cond = one_value
    refinements = []
    for mu1, mu2 in pairs:
        p1 = (mu2 - m) / (mu2 - mu1)
        if not 0.0 < p1 < 1.0:
            continue
        gap = majorization_gap(prior, left, right, mu1, mu2, p1)
        if gap > MAJORIZATION_TOL:
            refinements.append((mu1, mu2))
            continue
        cond = p1 * u.eval(mu1) + (1.0 - p1) * u.eval(mu2)
        if cond > best_cond + _IMPROVEMENT_TOL:
            best_cond = cond
            best = (mu1, mu2, p1)
    for mu1, mu2 in refinements:
        for fixed_low in (False, True):
            try:
                if fixed_low:
                    pair = (mu1, _boundary_pair_high(prior, left, right, mu1))
                else:
                    pair = (_boundary_pair_low(prior, left, right, mu2), mu2)
            except (InfeasibleTargetError, SolverToleranceError,
                    DegenerateIntervalError, DomainError):
                continue
            r1, r2 = pair
            if not left <= r1 < m < r2 <= right:
                continue
            p1 = (r2 - m) / (r2 - r1)
            if not 0.0 < p1 < 1.0:
                continue
            cond = p1 * u.eval(r1) + (1.0 - p1) * u.eval(r2)
            if cond > best_cond + _IMPROVEMENT_TOL:
                best_cond = cond
                best = (r1, r2, p1)
    if best is None:
        return None
    mu1, mu2, p1 = best
    return SegmentChoice(left, right, mu1, mu2, p1, mass * best_cond)


def _candidate_means(instance: Instance, grid: DpGrid):
    pts = set()
    for loc, _ in instance.utility.spikes:
        pts.add(loc)
    pts.update(instance.utility.breakpoints)
    pts.update(grid.user_points())
    return sorted(pts)


def solve_bipooling_dp(instance: Instance, budget: int, grid: DpGrid):
    """Best bi-pooling policy with interval boundaries on the grid.

    Returns ``(policy, value)``.  One-signal transitions replicate the
    partitional DP exactly, so the value dominates
    :func:`persuade.dp.solve_partitional_dp` on the same grid; ties prefer
    fewer signals and one-signal structure, so plainly partitional optima
    come back partitional.
    """
    if budget < 1:
        raise DomainError(f"signal budget must be at least 1, got {budget}")
    pts = grid.points
    n = len(pts)
    w1 = interval_value_table(instance, grid)
    master = _candidate_means(instance, grid)
    choices: dict[tuple[int, int], SegmentChoice] = {}
    if budget >= 2:
        for i in range(n - 1):
            lo = bisect.bisect_left(master, pts[i])
            for j in range(i + 1, n):
                hi = bisect.bisect_right(master, pts[j])
                if hi - lo < 1:
                    continue
                ch = best_two_signal(instance, pts[i], pts[j], master[lo:hi])
                if ch is not None:
                    choices[(i, j)] = ch
    values = np.full((budget + 1, n), -np.inf)
    values[0, 0] = 0.0
    parent: dict[tuple[int, int], tuple] = {}
    for k in range(1, budget + 1):
        for j in range(n):
            best = values[k - 1, j]
            arg = ("carry",)
            for i in range(j):
                base = values[k - 1, i]
                if base > -np.inf:
                    v = base + w1[i, j]
                    if v > best:
                        best, arg = v, ("one", i)
            if k >= 2:
                # a two-signal interval must clear the one-signal options by
                # more than float noise; cut-equivalent pairs otherwise win
                # ties by an ulp and misreport the structure
                for i in range(j):
                    if values[k - 2, i] == -np.inf:
                        continue
                    ch = choices.get((i, j))
                    if ch is not None:
                        v = values[k - 2, i] + ch.value
                        if v > best + _STRUCTURE_TOL:
                            best, arg = v, ("two", i)
            values[k, j] = best
            parent[(k, j)] = arg
    segments = []
    j, k = n - 1, budget
    while j > 0:
        kind = parent[(k, j)]
        if kind[0] == "carry":
            k -= 1
            continue
        i = kind[1]
        if kind[0] == "one":
            segments.append(one_signal_segment(pts[i], pts[j]))
            k -= 1
        else:
            ch = choices[(i, j)]
            segments.append(BiPoolingSegment(pts[i], pts[j], ch.mu1, ch.mu2, ch.p1))
            k -= 2
        j = i
    segments.reverse()
    return BiPoolingPolicy(tuple(segments)), float(values[budget, n - 1])


# ---------------------------------------------------------------------------
# exact oracle for small atomic priors
# ---------------------------------------------------------------------------


def brute_force_unrestricted(prior: Prior, utility: Utility, budget: int,
                             resolution: int,
                             monotone_splits: bool = False) -> float:
    """Enumerate signal allocations of an atomic prior (at most 3 atoms,
    at most 2 signals) at fraction resolution ``1/resolution``.

    Beyond the uniform fraction grid, the enumeration solves exactly for
    allocations whose posterior means hit spike locations (one linear
    constraint per spiked signal); a plain fraction grid can represent those
    only when the resolution happens to divide the required fraction.
    ``monotone_splits`` restricts signals to consecutive blocks of mass in
    state order, which is the partitional class for atomic priors.
    """
    if not prior.is_atomic:
        raise DomainError("the enumeration oracle requires a purely atomic prior")
    atoms = prior.atoms
    if not 1 <= len(atoms) <= 3:
        raise DomainError("the enumeration oracle supports 1 to 3 atoms")
    if budget not in (1, 2):
        raise DomainError("the enumeration oracle supports budgets 1 and 2")
    if resolution < 1:
        raise DomainError("resolution must be at least 1")
    count = (resolution + 1) ** (len(atoms) * (budget - 1))
    if count > 10**8:
        raise BudgetExceededError(
            f"{count} allocations exceed the 1e8 enumeration budget"
        )
    locs = np.array([a[0] for a in atoms])
    masses = np.array([a[1] for a in atoms])
    total_moment = float(np.dot(locs, masses))
    total_mean = total_moment  # total mass is 1
    if budget == 1:
        return utility.eval(total_mean)
    if monotone_splits:
        return _monotone_split_best(utility, locs, masses, total_moment,
                                    resolution)

    def score(cols) -> float:
        m1 = sum(c * mm for c, mm in zip(cols, masses))
        mom1 = sum(c * mm * x for c, mm, x in zip(cols, masses, locs))
        m1 = np.clip(np.atleast_1d(np.asarray(m1, dtype=float)), 0.0, 1.0)
        mom1 = np.atleast_1d(np.asarray(mom1, dtype=float))
        m2 = 1.0 - m1
        mom2 = total_moment - mom1
        mean1 = np.clip(mom1 / np.maximum(m1, _ZERO_MASS), 0.0, 1.0)
        mean2 = np.clip(mom2 / np.maximum(m2, _ZERO_MASS), 0.0, 1.0)
        val = np.where(m1 > _ZERO_MASS, m1 * utility.eval_array(mean1), 0.0)
        val += np.where(m2 > _ZERO_MASS, m2 * utility.eval_array(mean2), 0.0)
        return float(val.max())

    fr = np.linspace(0.0, 1.0, resolution + 1)
    rest = np.meshgrid(*([fr] * (len(atoms) - 1)), indexing="ij")
    rest = [r.ravel() for r in rest]
    best = utility.eval(total_mean)
    for f0 in fr:
        cols = [np.full(rest[0].shape if rest else (1,), f0)] + rest
        best = max(best, score(cols))

    spikes = [loc for loc, _ in utility.spikes]
    n_atoms = len(atoms)
    # single-spike enrichment: solve one atom's fraction so a signal's mean
    # lands exactly on the spike, everything else on the fraction grid
    sub = np.meshgrid(*([fr] * (n_atoms - 1)), indexing="ij")
    sub = [s.ravel() for s in sub] if sub else []
    for s in spikes:
        coeff = masses * (locs - s)
        for rhs in (0.0, float(coeff.sum())):
            for t in range(n_atoms):
                if abs(coeff[t]) < 1e-15:
                    continue
                others = [i for i in range(n_atoms) if i != t]
                acc = np.zeros(sub[0].shape if sub else (1,))
                for col, i in zip(sub, others):
                    acc = acc + col * coeff[i]
                ft = (rhs - acc) / coeff[t]
                ok = (ft >= -1e-12) & (ft <= 1.0 + 1e-12)
                if not ok.any():
                    continue
                ft = np.clip(ft[ok], 0.0, 1.0)
                cols = [None] * n_atoms
                cols[t] = ft
                for col, i in zip(sub, others):
                    cols[i] = (col[ok] if sub else np.zeros(1))
                best = max(best, score(cols))
    # double-spike enrichment: both signals on spikes pins the low signal's
    # total mass too, so two atom fractions are solved jointly
    for a in range(len(spikes)):
        for b in range(a + 1, len(spikes)):
            s_lo, s_hi = sorted((spikes[a], spikes[b]))
            if s_hi - s_lo < 1e-12:
                continue
            p_lo = (s_hi - total_mean) / (s_hi - s_lo)
            if not 0.0 < p_lo < 1.0:
                continue
            r1_full, r2_full = p_lo, p_lo * s_lo
            for t1 in range(n_atoms):
                for t2 in range(t1 + 1, n_atoms):
                    det = masses[t1] * masses[t2] * (locs[t2] - locs[t1])
                    if abs(det) < 1e-18:
                        continue
                    others = [i for i in range(n_atoms)
                              if i not in (t1, t2)]
                    shape = (resolution + 1,) if others else (1,)
                    r1 = np.full(shape, r1_full)
                    r2 = np.full(shape, r2_full)
                    for i in others:
                        r1 = r1 - fr * masses[i]
                        r2 = r2 - fr * masses[i] * locs[i]
                    f1 = masses[t2] * (r1 * locs[t2] - r2) / det
                    f2 = masses[t1] * (r2 - r1 * locs[t1]) / det
                    ok = ((f1 >= -1e-12) & (f1 <= 1 + 1e-12)
                          & (f2 >= -1e-12) & (f2 <= 1 + 1e-12))
                    if not ok.any():
                        continue
                    cols = [None] * n_atoms
                    cols[t1] = np.clip(f1[ok], 0.0, 1.0)
                    cols[t2] = np.clip(f2[ok], 0.0, 1.0)
                    for i in others:
                        cols[i] = fr[ok]
                    best = max(best, score(cols))
    return best


def _monotone_split_best(utility, locs, masses, total_moment, resolution):
    """Best 2-signal allocation whose signals take consecutive mass blocks."""
    prefix_m = np.concatenate(([0.0], np.cumsum(masses)))
    prefix_mom = np.concatenate(([0.0], np.cumsum(masses * locs)))
    best = utility.eval(float(total_moment))
    fractions = list(np.linspace(0.0, 1.0, resolution + 1))
    for t in range(len(locs)):
        phis = list(fractions)
        for s, _ in utility.spikes:
            denom = masses[t] * (locs[t] - s)
            if abs(denom) > 1e-15:
                phis.append((s * prefix_m[t] - prefix_mom[t]) / denom)
                phis.append(
                    (total_moment - prefix_mom[t] - s * (1.0 - prefix_m[t]))
                    / denom
                )
        for phi in phis:
            if not -1e-12 <= phi <= 1.0 + 1e-12:
                continue
            phi = min(max(phi, 0.0), 1.0)
            m1 = prefix_m[t] + phi * masses[t]
            mom1 = prefix_mom[t] + phi * masses[t] * locs[t]
            m2 = 1.0 - m1
            mom2 = total_moment - mom1
            value = 0.0
            if m1 > _ZERO_MASS:
                value += m1 * utility.eval(min(max(mom1 / m1, 0.0), 1.0))
            if m2 > _ZERO_MASS:
                value += m2 * utility.eval(min(max(mom2 / m2, 0.0), 1.0))
            best = max(best, value)
    return float(best)

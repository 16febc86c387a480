"""Interval policies, their induced posterior-mean distributions, and
mean-preserving-contraction checks.

Two policy families are supported.  A *partitional* policy cuts [0, 1] into
consecutive intervals and sends one deterministic signal per interval; atoms
sitting exactly on a cut may be split fractionally between the two adjacent
intervals.  A *bi-pooling* policy also tiles [0, 1] with intervals but may
carry either one signal (pooling the interval at its conditional mean) or two
signals with prescribed posterior means and conditional probabilities.

Cells use the left-closed convention: an interval owns its left endpoint and
the final interval also owns 1.  States exactly on a boundary have measure
zero under a continuous prior, so the convention only matters for atoms.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .exceptions import DomainError, InvalidPolicyError
from .measures import MASS_TOL, SNAP_TOL, Instance, Prior, Utility

_ZERO_MASS = 1e-15
MEAN_IDENTITY_TOL = 1e-9
MAJORIZATION_TOL = 1e-9


@dataclass(frozen=True)
class PartitionalPolicy:
    """Ordered cut points; ``atom_splits`` holds ``(location, fraction_left)``
    entries for cuts placed exactly on prior atoms."""

    cuts: tuple
    atom_splits: tuple = ()

    def __post_init__(self):
        cuts = tuple(float(c) for c in self.cuts)
        splits = tuple((float(x), float(f)) for (x, f) in self.atom_splits)
        object.__setattr__(self, "cuts", cuts)
        object.__setattr__(self, "atom_splits", splits)
        prev = 0.0
        for c in cuts:
            if not 0.0 <= c <= 1.0:
                raise InvalidPolicyError(f"cut {c} outside [0, 1]")
            if c < prev:
                raise InvalidPolicyError("cuts must be sorted")
            prev = c
        for loc, frac in splits:
            if loc not in cuts:
                raise InvalidPolicyError(f"atom split at {loc} has no matching cut")
            if not 0.0 <= frac <= 1.0:
                raise InvalidPolicyError(f"split fraction {frac} outside [0, 1]")

    @property
    def num_signals(self) -> int:
        return len(self.cuts) + 1


@dataclass(frozen=True)
class BiPoolingSegment:
    """One interval of a bi-pooling policy.

    ``mu1 is None`` marks a one-signal segment.  A two-signal segment induces
    posterior means ``mu1 < mu2`` with conditional probabilities ``p1`` and
    ``1 - p1``.
    """

    left: float
    right: float
    mu1: float | None = None
    mu2: float | None = None
    p1: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "left", float(self.left))
        object.__setattr__(self, "right", float(self.right))
        if self.left >= self.right:
            raise InvalidPolicyError("segment must have positive width")
        two = (self.mu1, self.mu2, self.p1)
        if any(v is None for v in two) != all(v is None for v in two):
            raise InvalidPolicyError("two-signal segments need mu1, mu2 and p1")
        if self.is_two_signal:
            object.__setattr__(self, "mu1", float(self.mu1))
            object.__setattr__(self, "mu2", float(self.mu2))
            object.__setattr__(self, "p1", float(self.p1))
            if not self.left <= self.mu1 < self.mu2 <= self.right:
                raise InvalidPolicyError(
                    f"need {self.left} <= mu1 < mu2 <= {self.right}"
                )
            if not 0.0 < self.p1 < 1.0:
                raise InvalidPolicyError(f"p1={self.p1} outside (0, 1)")

    @property
    def is_two_signal(self) -> bool:
        return self.mu1 is not None

    @property
    def num_signals(self) -> int:
        return 2 if self.is_two_signal else 1


def one_signal_segment(left: float, right: float) -> BiPoolingSegment:
    return BiPoolingSegment(left, right)


def two_signal_segment(prior: Prior, left: float, right: float, mu1: float,
                       mu2: float) -> BiPoolingSegment:
    """Build a two-signal segment with ``p1`` fixed by the mean identity."""
    m = _cell_mean(prior, left, right)
    if not mu1 < m < mu2:
        raise InvalidPolicyError(
            f"posterior means must bracket the interval mean {m}"
        )
    p1 = (mu2 - m) / (mu2 - mu1)
    return BiPoolingSegment(left, right, mu1, mu2, p1)


@dataclass(frozen=True)
class BiPoolingPolicy:
    segments: tuple

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise InvalidPolicyError("policy needs at least one segment")
        if abs(segs[0].left) > MEAN_IDENTITY_TOL:
            raise InvalidPolicyError("segments must start at 0")
        for a, b in zip(segs, segs[1:]):
            if abs(a.right - b.left) > MEAN_IDENTITY_TOL:
                raise InvalidPolicyError(f"segment gap at {a.right}")
        if abs(segs[-1].right - 1.0) > MEAN_IDENTITY_TOL:
            raise InvalidPolicyError("segments must end at 1")

    @property
    def num_signals(self) -> int:
        return sum(s.num_signals for s in self.segments)


@dataclass(frozen=True)
class MeanDistribution:
    """Finite distribution of posterior means, sorted by mean."""

    points: tuple

    def __post_init__(self):
        pts = tuple((float(m), float(w)) for (m, w) in self.points)
        object.__setattr__(self, "points", pts)
        total = 0.0
        prev = -1.0
        for m, w in pts:
            if w < -MASS_TOL:
                raise InvalidPolicyError(f"negative mass {w}")
            if m < prev:
                raise InvalidPolicyError("points must be sorted by mean")
            prev = m
            total += w
        if abs(total - 1.0) > 1e-9:
            raise InvalidPolicyError(f"masses sum to {total}, expected 1")

    @property
    def mean(self) -> float:
        return sum(m * w for m, w in self.points)

    def integrated_cdf(self, a: float) -> float:
        return sum(w * max(0.0, a - m) for m, w in self.points)


@dataclass(frozen=True)
class MpcReport:
    passed: bool
    mean_gap: float
    min_slack: float
    worst_location: float
    reason: str = ""


# ---------------------------------------------------------------------------
# cells and evaluation
# ---------------------------------------------------------------------------


def _cell_mass_moment(prior: Prior, a: float, b: float, is_last: bool):
    closed_right = is_last
    return (
        prior.mass(a, b, True, closed_right),
        prior.moment(a, b, True, closed_right),
    )


def _cell_mean(prior: Prior, left: float, right: float) -> float:
    is_last = right >= 1.0 - 1e-15
    m, mom = _cell_mass_moment(prior, left, right, is_last)
    if m <= _ZERO_MASS:
        raise DomainError(f"interval [{left}, {right}] carries no prior mass")
    return min(max(mom / m, left), right)


def _atom_mass_at(prior: Prior, loc: float) -> float | None:
    for x, m in prior.atoms:
        if abs(x - loc) <= MASS_TOL:
            return m
    return None


def partition_cells(instance: Instance, policy: PartitionalPolicy):
    """(mass, mean) per interval of a partitional policy, splits applied.

    Zero-mass intervals are returned with mass 0 and a placeholder mean; the
    evaluators skip them.
    """
    prior = instance.prior
    bounds = (0.0,) + policy.cuts + (1.0,)
    n = len(bounds) - 1
    masses = []
    moments = []
    for i in range(n):
        m, mom = _cell_mass_moment(prior, bounds[i], bounds[i + 1], i == n - 1)
        masses.append(m)
        moments.append(mom)
    for loc, frac in policy.atom_splits:
        am = _atom_mass_at(prior, loc)
        if am is None:
            raise InvalidPolicyError(f"atom split at {loc}: the prior has no atom there")
        # the atom sits on a cut and, by the left-closed convention, currently
        # belongs to the cell starting at the cut; move `frac` of it leftward
        i = policy.cuts.index(loc)
        masses[i] += frac * am
        moments[i] += frac * am * loc
        masses[i + 1] -= frac * am
        moments[i + 1] -= frac * am * loc
    cells = []
    for i in range(n):
        if masses[i] > _ZERO_MASS:
            mean = min(max(moments[i] / masses[i], bounds[i]), bounds[i + 1])
            cells.append((masses[i], mean))
        else:
            cells.append((0.0, bounds[i]))
    return cells


def evaluate_partitional(instance: Instance, policy: PartitionalPolicy) -> float:
    """Expected utility: sum over intervals of mass times utility at the
    interval's conditional mean."""
    u = instance.utility
    return sum(m * u.eval(mean) for m, mean in partition_cells(instance, policy)
               if m > _ZERO_MASS)


def _bipooling_points(instance: Instance, policy: BiPoolingPolicy,
                      identity_tol: float = MEAN_IDENTITY_TOL):
    """(mean, unconditional probability, utility weight points) per signal."""
    prior = instance.prior
    pts = []
    last = len(policy.segments) - 1
    for i, seg in enumerate(policy.segments):
        mass, moment = _cell_mass_moment(prior, seg.left, seg.right, i == last)
        if mass <= _ZERO_MASS:
            continue
        mean = min(max(moment / mass, seg.left), seg.right)
        if not seg.is_two_signal:
            pts.append((mean, mass))
            continue
        identity = seg.p1 * seg.mu1 + (1.0 - seg.p1) * seg.mu2
        if abs(identity - mean) > identity_tol:
            raise InvalidPolicyError(
                f"segment [{seg.left}, {seg.right}]: p1*mu1+(1-p1)*mu2="
                f"{identity} but the interval mean is {mean}"
            )
        pts.append((seg.mu1, seg.p1 * mass))
        pts.append((seg.mu2, (1.0 - seg.p1) * mass))
    return pts


def evaluate_bipooling(instance: Instance, policy: BiPoolingPolicy) -> float:
    u = instance.utility
    return sum(w * u.eval(m) for m, w in _bipooling_points(instance, policy))


def induced_mean_distribution(instance: Instance, policy) -> MeanDistribution:
    """One (posterior mean, signal probability) point per signal, with points
    closer than SNAP_TOL merged mass-weightedly."""
    if isinstance(policy, PartitionalPolicy):
        raw = [(mean, m) for m, mean in partition_cells(instance, policy)
               if m > _ZERO_MASS]
    elif isinstance(policy, BiPoolingPolicy):
        raw = _bipooling_points(instance, policy)
    else:
        raise DomainError(f"unsupported policy type {type(policy).__name__}")
    raw.sort()
    merged = []
    for mean, w in raw:
        if merged and abs(mean - merged[-1][0]) <= SNAP_TOL:
            m0, w0 = merged[-1]
            merged[-1] = ((m0 * w0 + mean * w) / (w0 + w), w0 + w)
        else:
            merged.append((mean, w))
    return MeanDistribution(tuple(merged))


# ---------------------------------------------------------------------------
# mean-preserving-contraction checks
# ---------------------------------------------------------------------------


def check_mpc(prior: Prior, dist: MeanDistribution,
              tol: float = MAJORIZATION_TOL) -> MpcReport:
    """Verify that ``dist`` is a mean-preserving contraction of the prior.

    Mean preservation is checked directly.  Majorization (the integrated
    prior CDF dominating the integrated distribution CDF everywhere) is
    checked at the breakpoints of both integrals plus, per support gap, the
    interior stationary point where the prior CDF crosses the gap's constant
    level; the difference is convex between breakpoints, so these points
    carry its minimum.
    """
    mean_gap = dist.mean - prior.total_mean
    if abs(mean_gap) > tol:
        return MpcReport(False, mean_gap, 0.0, 1.0,
                         f"mean preservation violated by {mean_gap}")
    candidates = {0.0, 1.0}
    candidates.update(prior.breakpoints)
    level = 0.0
    support = [m for m, _ in dist.points]
    for i, (m, w) in enumerate(dist.points):
        candidates.add(m)
        level += w
        hi = support[i + 1] if i + 1 < len(support) else 1.0
        if hi > m:
            candidates.add(prior.cdf_inverse(level, m, hi))
    min_slack, worst = float("inf"), 0.0
    for a in sorted(candidates):
        slack = prior.integrated_cdf(a) - dist.integrated_cdf(a)
        if slack < min_slack:
            min_slack, worst = slack, a
    if min_slack < -tol:
        return MpcReport(False, mean_gap, min_slack, worst,
                         f"majorization violated near {worst} by {min_slack}")
    return MpcReport(True, mean_gap, min_slack, worst)


def majorization_gap(prior: Prior, left: float, right: float, mu1: float,
                     mu2: float, p1: float) -> float:
    """Largest violation of the conditional majorization constraint.

    For the two-point distribution on ``(mu1, mu2)`` with weights
    ``(p1, 1-p1)`` against the prior conditioned on ``[left, right)``, returns
    the maximum over the interval of (integrated two-point CDF) minus
    (integrated conditional CDF).  Nonpositive means the two-point
    distribution is a feasible contraction; the maximum sits where the
    conditional CDF crosses ``p1``, plus possibly at a CDF breakpoint.
    """
    is_last = right >= 1.0 - 1e-15
    mass = prior.mass(left, right, True, is_last)
    if mass <= _ZERO_MASS:
        raise DomainError(f"interval [{left}, {right}] carries no prior mass")
    below = prior.cdf(left) - (_atom_mass_at(prior, left) or 0.0)
    icdf_left = prior.integrated_cdf(left)

    def gap_at(a: float) -> float:
        cond = (prior.integrated_cdf(a) - icdf_left - below * (a - left)) / mass
        two_point = p1 * max(0.0, a - mu1) + (1.0 - p1) * max(0.0, a - mu2)
        return two_point - cond

    candidates = [mu1, mu2, prior.cdf_inverse(below + p1 * mass, mu1, mu2)]
    lo = bisect.bisect_left(prior.breakpoints, mu1)
    hi = bisect.bisect_right(prior.breakpoints, mu2)
    candidates.extend(prior.breakpoints[lo:hi])
    return max(gap_at(a) for a in candidates)


def two_point_feasible(prior: Prior, left: float, right: float, mu1: float,
                       mu2: float):
    """Whether posterior means ``mu1 < mu2`` are jointly inducible on the
    interval, and the conditional probability ``p1`` the mean identity forces.

    Returns ``(feasible, p1)``.  ``p1`` outside (0, 1) (the means fail to
    bracket the conditional mean) reports infeasible directly.
    """
    if not 0.0 <= left < right <= 1.0:
        raise DomainError(f"bad interval [{left}, {right}]")
    if not (left <= mu1 <= right and left <= mu2 <= right):
        raise DomainError("posterior means must lie inside the interval")
    if mu1 >= mu2:
        raise DomainError("two-point checks need mu1 < mu2; pool into one signal")
    m = _cell_mean(prior, left, right)
    p1 = (mu2 - m) / (mu2 - mu1)
    if not 0.0 < p1 < 1.0:
        return False, p1
    gap = majorization_gap(prior, left, right, mu1, mu2, p1)
    return gap <= MAJORIZATION_TOL, p1

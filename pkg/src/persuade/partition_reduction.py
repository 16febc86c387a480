"""Exact-rational reduction from the Partition problem to optimal-cut search.

Given positive integers ``c``, the builder emits a uniform-prior instance
whose utility is 1 on a set ``X`` of 2n+1 rational points and 0 elsewhere.
Cut lists achieving expected utility exactly 1 with n+1 intervals correspond
one-to-one with sign vectors ``b`` satisfying ``sum(b_i * c_i) == 0``:
interval midpoints must land on ``X``, one point per ``c_i`` pair, and the
final interval closes flush at 1 only when the signed sum vanishes.

Everything here runs on ``fractions.Fraction``; the correctness of the
correspondence rests on endpoints matching exactly, which floats destroy.
The exported float instance is for feeding the approximate solvers only;
grid solvers cannot certify that no utility-1 cut list exists.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .exceptions import DomainError
from .measures import Instance, Prior, Utility

_HALF = Fraction(1, 2)


@dataclass(frozen=True)
class PartitionInput:
    """Positive integers defining a Partition-problem instance."""

    values: tuple

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise DomainError("need at least one value")
        if any(v < 1 for v in vals):
            raise DomainError("all values must be positive integers")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ReductionArtifacts:
    """Exact data of one reduced instance.

    ``d`` is the base width 1/2^(n+1), ``t`` the weight normalizer
    1 + sum(c), ``x`` the sorted utility-1 points, and ``k`` = n + 1 the
    number of intervals a certificate uses.
    """

    c: PartitionInput
    d: Fraction
    t: Fraction
    x: tuple
    k: int

    @property
    def x_set(self) -> frozenset:
        return frozenset(self.x)

    def float_instance(self, lipschitz: float | None = None) -> Instance:
        """Float twin for the approximate solvers (see the module note)."""
        label = f"reduction(c={','.join(str(v) for v in self.c.values)})"
        if lipschitz is None:
            spikes = tuple((float(p), 1.0) for p in self.x)
            return Instance(Prior.uniform(), Utility.zero_with_spikes(spikes),
                            label)
        return Instance(Prior.uniform(),
                        _tent_utility(self.x, float(lipschitz)), label)


def _tent_utility(points, slope: float) -> Utility:
    """Piecewise-linear utility: unit tents of slope ``slope`` at each point.

    Supports must not overlap, so the slope has to exceed 2 over the smallest
    gap between points.
    """
    pts = sorted(float(p) for p in points)
    if slope <= 0.0:
        raise DomainError("tent slope must be positive")
    min_gap = min(b - a for a, b in zip(pts, pts[1:]))
    if 2.0 / slope >= min_gap:
        raise DomainError(
            f"tents of slope {slope} overlap; need slope > {2.0 / min_gap}"
        )
    half = 1.0 / slope
    segs = []
    cursor = 0.0
    for p in pts:
        lo, hi = max(p - half, 0.0), min(p + half, 1.0)
        if lo > cursor:
            segs.append((cursor, lo, 0.0, 0.0))
        segs.append((lo, p, 1.0 - slope * (p - lo), 1.0))
        if hi > p:
            segs.append((p, hi, 1.0, 1.0 - slope * (hi - p)))
        cursor = hi
    if cursor < 1.0:
        segs.append((cursor, 1.0, 0.0, 0.0))
    return Utility(tuple(segs), (), lipschitz=slope, ubound=1.0)


def reduce_partition(c) -> ReductionArtifacts:
    """Build the exact reduction artifacts for Partition input ``c``."""
    if not isinstance(c, PartitionInput):
        c = PartitionInput(tuple(c))
    n = len(c)
    d = Fraction(1, 2 ** (n + 1))
    t = Fraction(1 + sum(c.values))
    x = [d]
    for j, cj in enumerate(c.values, start=1):
        center = 3 * 2 ** (j - 1)
        offset = Fraction(cj, 2 * t)
        x.append(d * (center - offset))
        x.append(d * (center + offset))
    x = tuple(sorted(x))
    if len(set(x)) != 2 * n + 1:
        raise DomainError("utility points collide; reduction undefined")
    return ReductionArtifacts(c, d, t, x, n + 1)


def encode_solution(c, b):
    """Cut list encoding sign vector ``b``; flags whether it certifies.

    Returns ``(cuts, is_certificate)``: the n cut points (exact rationals)
    and whether the implied final endpoint lands exactly on 1, which happens
    iff ``sum(b_i * c_i) == 0``.
    """
    if not isinstance(c, PartitionInput):
        c = PartitionInput(tuple(c))
    b = tuple(int(s) for s in b)
    if len(b) != len(c) or any(s not in (-1, 1) for s in b):
        raise DomainError("signs must be a +/-1 vector matching c")
    d = Fraction(1, 2 ** (len(c) + 1))
    t = Fraction(1 + sum(c.values))
    cuts = []
    signed_sum = 0
    endpoint = d * 2  # j = 0 term
    for j in range(1, len(c) + 1):
        cuts.append(endpoint)
        signed_sum += b[j - 1] * c.values[j - 1]
        parity = -1 if j % 2 == 0 else 1
        endpoint = d * (2 ** (j + 1) + parity * Fraction(signed_sum, t))
    return tuple(cuts), endpoint == 1


def verify_certificate(artifacts: ReductionArtifacts, cuts):
    """Exact expected utility of a cut list and whether it certifies.

    Under the uniform prior each interval's posterior mean is its midpoint;
    utility accrues on intervals whose midpoint lies in ``X``.  Returns
    ``(utility, passed)`` with the utility an exact Fraction; ``passed``
    requires utility exactly 1.
    """
    cuts = tuple(Fraction(v) for v in cuts)
    for a, b in zip(cuts, cuts[1:]):
        if b < a:
            raise DomainError("cuts must be sorted")
    if cuts and (cuts[0] < 0 or cuts[-1] > 1):
        raise DomainError("cuts must lie inside [0, 1]")
    bounds = (Fraction(0),) + cuts + (Fraction(1),)
    xset = artifacts.x_set
    utility = Fraction(0)
    for a, b in zip(bounds, bounds[1:]):
        if b > a and (a + b) / 2 in xset:
            utility += b - a
    return utility, utility == 1


def certificate_posteriors(artifacts: ReductionArtifacts, cuts):
    """Midpoints of the positive-length intervals of a cut list."""
    cuts = tuple(Fraction(v) for v in cuts)
    bounds = (Fraction(0),) + cuts + (Fraction(1),)
    return tuple((a + b) / 2 for a, b in zip(bounds, bounds[1:]) if b > a)


def decode_policy(artifacts: ReductionArtifacts, cuts):
    """Recover the sign vector from a certifying cut list, or None.

    Interval j's midpoint sits at ``d * (3 * 2^(j-1) + s * c_j / (2t))``; the
    sign read off as ``s`` relates to the Partition sign through the parity
    ``(-1)^(j+1)`` the encoder applied.
    """
    _, passed = verify_certificate(artifacts, cuts)
    if not passed:
        return None
    mids = certificate_posteriors(artifacts, cuts)
    n = len(artifacts.c)
    if len(mids) != n + 1 or mids[0] != artifacts.d:
        return None
    signs = []
    for j, mid in enumerate(mids[1:], start=1):
        cj = artifacts.c.values[j - 1]
        offset = artifacts.d * Fraction(cj, 2 * artifacts.t)
        center = artifacts.d * (3 * 2 ** (j - 1))
        if mid == center + offset:
            s = 1
        elif mid == center - offset:
            s = -1
        else:
            return None
        parity = -1 if j % 2 == 0 else 1
        signs.append(s * parity)
    return tuple(signs)


def find_certificate(artifacts: ReductionArtifacts):
    """Exhaustive sign search; returns ``(b, cuts)`` or None.

    Enumerates all 2^n sign vectors.  Every utility-1 cut list arises from
    some sign vector, so an empty search certifies a NO instance at this
    scale.
    """
    c = artifacts.c
    for b in itertools.product((1, -1), repeat=len(c)):
        cuts, is_cert = encode_solution(c, b)
        if is_cert:
            _, passed = verify_certificate(artifacts, cuts)
            if passed:
                return b, cuts
    return None

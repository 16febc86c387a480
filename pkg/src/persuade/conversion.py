"""Turning bi-pooling policies into partitional ones at half the value, or
better.

One-signal intervals carry over verbatim.  A two-signal interval keeps the
signal with the larger probability-weighted utility: the interval is cut at
the unique point where one side's conditional mean equals the kept posterior
mean, so the kept signal survives with weakly more probability than before
while the discarded side can only add value.  Summing over intervals, the
converted policy retains at least half of the original expected utility and
uses one fewer signal than cut count allows.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exceptions import ConversionError, PersuadeError
from .measures import ROOT_TOL, Instance, solve_left_endpoint, solve_right_endpoint
from .policies import (
    BiPoolingPolicy,
    PartitionalPolicy,
    evaluate_bipooling,
    evaluate_partitional,
    partition_cells,
)

GUARANTEE_TOL = 1e-9
_ZERO_MASS = 1e-15


@dataclass(frozen=True)
class SegmentRecord:
    left: float
    right: float
    two_signal: bool
    kept_mean: float | None
    cut: float | None
    value_original: float
    value_converted: float


@dataclass(frozen=True)
class ConversionReport:
    value_original: float
    value_converted: float
    ratio: float | None
    guarantee_ok: bool
    segments: tuple


def convert_bipooling_to_partitional(instance: Instance, policy: BiPoolingPolicy,
                                     tol: float = ROOT_TOL) -> PartitionalPolicy:
    """Convert a valid bi-pooling policy into a partitional policy whose
    expected utility is at least half the original.

    Cuts are the original interval boundaries plus one interior cut per
    two-signal interval; their count stays below the policy's signal count.
    """
    prior, u = instance.prior, instance.utility
    cuts: list[float] = []
    for seg in policy.segments:
        if seg.right < 1.0 - 1e-15:
            cuts.append(seg.right)
        if not seg.is_two_signal:
            continue
        p2 = 1.0 - seg.p1
        keep_low = seg.p1 * u.eval(seg.mu1) >= p2 * u.eval(seg.mu2)
        try:
            if keep_low:
                c = solve_right_endpoint(prior, seg.left, seg.mu1, tol)
            else:
                c = solve_left_endpoint(prior, seg.right, seg.mu2, tol)
        except PersuadeError as exc:
            raise ConversionError(
                f"segment [{seg.left}, {seg.right}]: cannot place a cut whose "
                f"side mean matches {'mu1' if keep_low else 'mu2'} "
                f"({seg.mu1 if keep_low else seg.mu2}): {exc}"
            ) from exc
        if not seg.left < c < seg.right:
            raise ConversionError(
                f"segment [{seg.left}, {seg.right}]: root {c} escaped the segment"
            )
        cuts.append(c)
    cuts = sorted(set(cuts))
    return PartitionalPolicy(cuts=tuple(cuts))


def conversion_certificate(instance: Instance, policy: BiPoolingPolicy,
                           converted: PartitionalPolicy) -> ConversionReport:
    """Value comparison of a policy and its conversion, per-segment included."""
    u = instance.utility
    value_original = evaluate_bipooling(instance, policy)
    value_converted = evaluate_partitional(instance, converted)
    cells = partition_cells(instance, converted)
    bounds = (0.0,) + converted.cuts + (1.0,)
    records = []
    for seg in policy.segments:
        conv = 0.0
        for (mass, mean), lo in zip(cells, bounds):
            if mass > _ZERO_MASS and seg.left - 1e-12 <= lo < seg.right - 1e-12:
                conv += mass * u.eval(mean)
        prior = instance.prior
        closed = seg.right >= 1.0 - 1e-15
        mass = prior.mass(seg.left, seg.right, True, closed)
        if seg.is_two_signal:
            orig = mass * (seg.p1 * u.eval(seg.mu1)
                           + (1.0 - seg.p1) * u.eval(seg.mu2))
            kept = seg.mu1 if seg.p1 * u.eval(seg.mu1) >= (1.0 - seg.p1) * u.eval(seg.mu2) else seg.mu2
            cut = next((c for c in converted.cuts
                        if seg.left + 1e-15 < c < seg.right - 1e-15), None)
            records.append(SegmentRecord(seg.left, seg.right, True, kept, cut,
                                         orig, conv))
        else:
            orig = mass * u.eval(prior.mean(seg.left, seg.right, True, closed)) \
                if mass > _ZERO_MASS else 0.0
            records.append(SegmentRecord(seg.left, seg.right, False, None, None,
                                         orig, conv))
    ratio = value_converted / value_original if value_original > 1e-15 else None
    ok = value_converted >= 0.5 * value_original - GUARANTEE_TOL
    return ConversionReport(value_original, value_converted, ratio, ok,
                            tuple(records))

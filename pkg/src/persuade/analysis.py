"""Price-of-explainability measurement, built-in instance families, and the
piecewise-Lipschitz discretizer.

The headline quantity compares the best partitional (cut-based) policy
against the best unrestricted policy at the same signal budget.  For density
priors both sides are grid solvers sharing one base grid; the partitional
side additionally receives the cuts obtained by converting the unrestricted
solution, which pins the ratio at or above one half by construction rather
than by luck of the grid.  Purely atomic priors route through the exact
enumeration oracle instead, with and without the monotone-split restriction.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .conversion import convert_bipooling_to_partitional
from .dp import solve_partitional_dp
from .exceptions import DomainError
from .grids import DpGrid, default_grid
from .measures import Instance, Prior, Utility
from .partition_reduction import reduce_partition
from .unrestricted import brute_force_unrestricted, solve_bipooling_dp

DEFAULT_SEED = 20240901
_HALF = Fraction(1, 2)


@dataclass(frozen=True)
class PoeResult:
    """Ratio of best-partitional to best-unrestricted value at one budget.

    ``ratio`` is None when the unrestricted optimum is zero (undefined
    ratio); both optima are always reported.
    """

    opt_partitional: float
    opt_unrestricted: float
    ratio: float | None
    budget: int
    label: str = ""


def poe(instance: Instance, budget: int, grid: DpGrid | None = None,
        epsilon: float = 0.05, resolution: int = 200) -> PoeResult:
    """Measure the explainability gap of one instance at one signal budget."""
    if instance.prior.is_atomic:
        if budget > 2:
            raise DomainError(
                "atomic priors route through the enumeration oracle, which "
                "supports budgets 1 and 2"
            )
        opt = brute_force_unrestricted(instance.prior, instance.utility,
                                       budget, resolution)
        opt_part = brute_force_unrestricted(instance.prior, instance.utility,
                                            budget, resolution,
                                            monotone_splits=True)
    else:
        if grid is None:
            grid = default_grid(instance, epsilon)
        policy, opt = solve_bipooling_dp(instance, budget, grid)
        converted = convert_bipooling_to_partitional(instance, policy)
        enriched = grid.with_extra(converted.cuts) if converted.cuts else grid
        _, opt_part = solve_partitional_dp(instance, budget, enriched)
    ratio = opt_part / opt if opt > 1e-12 else None
    return PoeResult(opt_part, opt, ratio, budget, instance.label)


# ---------------------------------------------------------------------------
# built-in instance families
# ---------------------------------------------------------------------------


def tight_instance(p) -> Instance:
    """Three-atom family whose explainability ratio is exactly ``1 - p``.

    The prior puts mass (p, 1-2p, p) on (0, 1/2, 1); utility is 1 exactly at
    the conditional means of the lower and upper atom pairs.  Floats are
    routed through Fraction(str(.)) so rational ``p`` keeps the spike
    locations exact.
    """
    pf = Fraction(str(p)) if isinstance(p, float) else Fraction(p)
    if not 0 < pf < _HALF:
        raise DomainError(f"p must lie in (0, 1/2), got {p}")
    mu1 = (1 - 2 * pf) / (2 * (1 - pf))
    mu2 = 1 / (2 * (1 - pf))
    prior = Prior.from_atoms(((0.0, float(pf)), (0.5, float(1 - 2 * pf)),
                              (1.0, float(pf))))
    utility = Utility.zero_with_spikes(((float(mu1), 1.0), (float(mu2), 1.0)))
    return Instance(prior, utility, label=f"tight(p={pf})")


def builtin_instance(name: str, p=None, c=None) -> Instance:
    """Named instances: ``example_1_1``, ``example_2_1``, ``tight`` (needs
    ``p``), ``reduction`` (needs ``c``)."""
    if name == "example_2_1":
        utility = Utility.zero_with_spikes(((1.0 / 3.0, 1.0), (2.0 / 3.0, 1.0)))
        return Instance(Prior.uniform(), utility, label="example_2_1")
    if name == "example_1_1":
        utility = Utility.piecewise_constant(
            ((0.0, 0.4, 0.0), (0.4, 0.8, 0.9), (0.8, 1.0, 1.0)))
        return Instance(Prior.uniform(), utility, label="example_1_1")
    if name == "tight":
        if p is None:
            raise DomainError("the tight family needs p")
        return tight_instance(p)
    if name == "reduction":
        if c is None:
            raise DomainError("the reduction family needs c")
        return reduce_partition(c).float_instance()
    raise DomainError(f"unknown builtin instance {name!r}")


def discretize_utility(utility: Utility, epsilon: float) -> Utility:
    """Flatten a Lipschitz-flagged utility to piecewise constants.

    Every sloped piece is subdivided into subintervals no wider than
    ``epsilon / L`` and replaced by its midpoint value, so the sup-norm error
    stays within ``epsilon / 2`` per piece; already-constant pieces pass
    through untouched.
    """
    if utility.lipschitz is None:
        raise DomainError("discretization needs a Lipschitz-flagged utility")
    if epsilon <= 0.0:
        raise DomainError("epsilon must be positive")
    level = utility.lipschitz
    segs = []
    for l, r, vl, vr in utility.base_segments:
        slope = (vr - vl) / (r - l)
        if abs(slope) < 1e-15:
            segs.append((l, r, vl, vr))
            continue
        parts = max(int(np.ceil((r - l) * level / epsilon)), 1)
        edges = np.linspace(l, r, parts + 1)
        for a, b in zip(edges, edges[1:]):
            v = vl + slope * (0.5 * (a + b) - l)
            segs.append((float(a), float(b), v, v))
    return Utility(tuple(segs), (), lipschitz=utility.lipschitz,
                   ubound=utility.ubound)


# ---------------------------------------------------------------------------
# randomized corpus
# ---------------------------------------------------------------------------


def random_prior(rng: np.random.Generator, fbar_max: float = 2.0) -> Prior:
    """Uniform half the time, otherwise a full-support affine density with
    peak density below ``fbar_max``."""
    if rng.random() < 0.5:
        return Prior.uniform()
    cap = min(2.0 * (fbar_max - 1.0), 1.8)
    slope = float(rng.uniform(-cap, cap))
    return Prior.affine(slope)


def random_piecewise_utility(rng: np.random.Generator, max_pieces: int = 6,
                             max_spikes: int = 3) -> Utility:
    """Random piecewise-constant base with up to ``max_spikes`` spikes."""
    pieces = int(rng.integers(1, max_pieces + 1))
    edges = np.sort(rng.uniform(0.05, 0.95, size=pieces - 1))
    bounds = np.concatenate(([0.0], edges, [1.0]))
    values = rng.uniform(0.0, 1.0, size=pieces)
    base = tuple((float(a), float(b), float(v))
                 for a, b, v in zip(bounds, bounds[1:], values))
    n_spikes = int(rng.integers(0, max_spikes + 1))
    locs = np.sort(rng.uniform(0.02, 0.98, size=n_spikes))
    spikes = []
    prev = -1.0
    for loc in locs:
        if loc - prev <= 1e-6:
            continue
        spikes.append((float(loc), float(rng.uniform(0.3, 1.0))))
        prev = loc
    return Utility.piecewise_constant(base, tuple(spikes))


def random_lipschitz_utility(rng: np.random.Generator, l_max: float = 5.0,
                             max_pieces: int = 4) -> Utility:
    """Random continuous piecewise-linear utility with slopes below ``l_max``."""
    target = float(rng.uniform(0.5, l_max))
    pieces = int(rng.integers(1, max_pieces + 1))
    edges = np.sort(rng.uniform(0.1, 0.9, size=pieces - 1))
    bounds = np.concatenate(([0.0], edges, [1.0]))
    values = [float(rng.uniform(0.0, 1.0))]
    for a, b in zip(bounds, bounds[1:]):
        lo = max(values[-1] - target * (b - a), 0.0)
        hi = min(values[-1] + target * (b - a), 1.0)
        values.append(float(rng.uniform(lo, hi)))
    segs = tuple((float(a), float(b), va, vb)
                 for a, b, va, vb in zip(bounds, bounds[1:], values, values[1:]))
    return Utility(segs, (), lipschitz=target, ubound=1.0)


def random_instance(rng: np.random.Generator, lipschitz: bool = False,
                    max_pieces: int = 6, max_spikes: int = 3,
                    l_max: float = 5.0, fbar_max: float = 2.0,
                    label: str = "") -> Instance:
    prior = random_prior(rng, fbar_max)
    if lipschitz:
        utility = random_lipschitz_utility(rng, l_max)
    else:
        utility = random_piecewise_utility(rng, max_pieces, max_spikes)
    return Instance(prior, utility, label)

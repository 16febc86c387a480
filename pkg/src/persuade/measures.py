"""Priors on the unit interval, interim utilities, and interval statistics.

A prior is a probability measure on [0, 1] written as a piecewise-affine
density plus a finite list of atoms.  Affine pieces keep every interval
integral closed-form, which is all the solvers need: interval mass, interval
first moment, conditional means, the CDF, its integral, and its inverse.

An interim utility maps a posterior mean to a payoff.  It is a
piecewise-linear base (left-closed pieces) plus optional point "spikes" that
override the base at exact locations.  Posterior means produced by floating
point solvers can only hit a measure-zero spike approximately, so evaluation
snaps any input within ``SNAP_TOL`` of a spike location onto the spike.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import (
    DegenerateIntervalError,
    DomainError,
    InfeasibleTargetError,
    SolverToleranceError,
)

#: Posterior means within this distance of a spike evaluate to the spike value.
SNAP_TOL = 1e-9
#: Default tolerance of the conditional-mean root solvers.
ROOT_TOL = 1e-10
#: Probability mass bookkeeping must balance this closely.
MASS_TOL = 1e-12

_ZERO_MASS = 1e-15
_BISECT_MAX_ITER = 200

# Root solutions can miss a spike location by up to ROOT_TOL, so snapping has
# to be coarser than the root tolerance or spike payoffs become unreachable.
assert SNAP_TOL > ROOT_TOL


def _mass_of_affine(left, right, c0, c1):
    return c0 * (right - left) + 0.5 * c1 * (right * right - left * left)


def _moment_of_affine(left, right, c0, c1):
    return 0.5 * c0 * (right * right - left * left) + c1 * (right**3 - left**3) / 3.0


@dataclass(frozen=True)
class Prior:
    """Probability measure on [0, 1]: affine density pieces plus atoms.

    ``density_segments`` is an ordered tuple of ``(left, right, c0, c1)``
    entries meaning density ``c0 + c1 * x`` on ``[left, right)``; the pieces
    must tile [0, 1].  ``atoms`` is an ordered tuple of ``(location, mass)``
    with strictly increasing locations.  Total mass must equal 1 within
    ``MASS_TOL``.
    """

    density_segments: tuple
    atoms: tuple = ()

    def __post_init__(self):
        segs = tuple(
            (float(l), float(r), float(c0), float(c1))
            for (l, r, c0, c1) in self.density_segments
        )
        atoms = tuple((float(x), float(m)) for (x, m) in self.atoms)
        object.__setattr__(self, "density_segments", segs)
        object.__setattr__(self, "atoms", atoms)
        self._validate()

    def _validate(self):
        if not self.density_segments:
            raise DomainError("prior needs at least one density segment")
        prev_right = 0.0
        for left, right, c0, c1 in self.density_segments:
            if abs(left - prev_right) > MASS_TOL:
                raise DomainError(
                    f"density segments must tile [0, 1]; gap at {prev_right}"
                )
            if right <= left:
                raise DomainError("density segment must have positive width")
            if c0 + c1 * left < -MASS_TOL or c0 + c1 * right < -MASS_TOL:
                raise DomainError("density must be nonnegative on every segment")
            prev_right = right
        if abs(prev_right - 1.0) > MASS_TOL:
            raise DomainError("density segments must end at 1")
        prev_loc = -1.0
        for loc, mass in self.atoms:
            if not 0.0 <= loc <= 1.0:
                raise DomainError("atom locations must lie in [0, 1]")
            if loc <= prev_loc:
                raise DomainError("atom locations must be strictly increasing")
            if mass < 0.0:
                raise DomainError("atom masses must be nonnegative")
            prev_loc = loc
        total = self._density_total + self._atom_total
        if abs(total - 1.0) > 1e-10:
            raise DomainError(f"total prior mass is {total}, expected 1")

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def uniform() -> "Prior":
        return Prior(density_segments=((0.0, 1.0, 1.0, 0.0),))

    @staticmethod
    def affine(slope: float) -> "Prior":
        """Full-support affine density ``f(x) = (1 - slope/2) + slope * x``."""
        return Prior(density_segments=((0.0, 1.0, 1.0 - 0.5 * slope, slope),))

    @staticmethod
    def from_atoms(atoms) -> "Prior":
        """Purely atomic prior; the zero density still tiles [0, 1]."""
        return Prior(density_segments=((0.0, 1.0, 0.0, 0.0),), atoms=tuple(atoms))

    # -- cached internals ----------------------------------------------------

    @cached_property
    def _seg_lefts(self):
        return [s[0] for s in self.density_segments]

    @cached_property
    def _seg_cum_mass(self):
        acc, out = 0.0, []
        for l, r, c0, c1 in self.density_segments:
            out.append(acc)
            acc += _mass_of_affine(l, r, c0, c1)
        out.append(acc)
        return out

    @cached_property
    def _seg_cum_moment(self):
        acc, out = 0.0, []
        for l, r, c0, c1 in self.density_segments:
            out.append(acc)
            acc += _moment_of_affine(l, r, c0, c1)
        out.append(acc)
        return out

    @cached_property
    def _density_total(self):
        return self._seg_cum_mass[-1]

    @cached_property
    def _atom_locs(self):
        return [a[0] for a in self.atoms]

    @cached_property
    def _atom_cum(self):
        acc, out = 0.0, [0.0]
        for _, m in self.atoms:
            acc += m
            out.append(acc)
        return out

    @cached_property
    def _atom_moment_cum(self):
        acc, out = 0.0, [0.0]
        for x, m in self.atoms:
            acc += x * m
            out.append(acc)
        return out

    @cached_property
    def _atom_total(self):
        return self._atom_cum[-1]

    @property
    def is_uniform(self) -> bool:
        return self.density_segments == ((0.0, 1.0, 1.0, 0.0),) and not self.atoms

    @property
    def is_atomic(self) -> bool:
        return self._density_total <= MASS_TOL

    @cached_property
    def max_density(self) -> float:
        return max(
            max(c0 + c1 * l, c0 + c1 * r) for (l, r, c0, c1) in self.density_segments
        )

    @cached_property
    def breakpoints(self):
        """Locations where the CDF changes analytic form."""
        pts = {s[0] for s in self.density_segments} | {1.0} | set(self._atom_locs)
        return tuple(sorted(pts))

    # -- pointwise quantities ------------------------------------------------

    def _seg_index(self, x: float) -> int:
        i = bisect.bisect_right(self._seg_lefts, x) - 1
        return min(max(i, 0), len(self.density_segments) - 1)

    def density_mass_below(self, x: float) -> float:
        """Integral of the density over [0, x]."""
        if x <= 0.0:
            return 0.0
        x = min(x, 1.0)
        i = self._seg_index(x)
        l, _, c0, c1 = self.density_segments[i]
        return self._seg_cum_mass[i] + _mass_of_affine(l, x, c0, c1)

    def density_moment_below(self, x: float) -> float:
        if x <= 0.0:
            return 0.0
        x = min(x, 1.0)
        i = self._seg_index(x)
        l, _, c0, c1 = self.density_segments[i]
        return self._seg_cum_moment[i] + _moment_of_affine(l, x, c0, c1)

    def _atom_index(self, x: float, inclusive: bool) -> int:
        if inclusive:
            return bisect.bisect_right(self._atom_locs, x)
        return bisect.bisect_left(self._atom_locs, x)

    def cdf(self, x: float) -> float:
        """Right-continuous CDF: P(state <= x)."""
        return self.density_mass_below(x) + self._atom_cum[self._atom_index(x, True)]

    def mass(self, a: float, b: float, closed_left: bool = True,
             closed_right: bool = True) -> float:
        if not (0.0 <= a <= b <= 1.0):
            raise DomainError(f"interval [{a}, {b}] is not inside [0, 1]")
        dens = self.density_mass_below(b) - self.density_mass_below(a)
        lo = self._atom_index(a, not closed_left)
        hi = self._atom_index(b, closed_right)
        hi = max(hi, lo)
        return max(dens + self._atom_cum[hi] - self._atom_cum[lo], 0.0)

    def moment(self, a: float, b: float, closed_left: bool = True,
               closed_right: bool = True) -> float:
        if not (0.0 <= a <= b <= 1.0):
            raise DomainError(f"interval [{a}, {b}] is not inside [0, 1]")
        dens = self.density_moment_below(b) - self.density_moment_below(a)
        lo = self._atom_index(a, not closed_left)
        hi = max(self._atom_index(b, closed_right), lo)
        return dens + self._atom_moment_cum[hi] - self._atom_moment_cum[lo]

    def mean(self, a: float, b: float, closed_left: bool = True,
             closed_right: bool = True) -> float:
        m = self.mass(a, b, closed_left, closed_right)
        if m <= _ZERO_MASS:
            raise DegenerateIntervalError(f"interval [{a}, {b}] carries no mass")
        mu = self.moment(a, b, closed_left, closed_right) / m
        return min(max(mu, a), b)

    @cached_property
    def total_mean(self) -> float:
        return self.moment(0.0, 1.0) / self.mass(0.0, 1.0)

    # -- integrated CDF and its inverse ---------------------------------------

    def integrated_cdf(self, a: float) -> float:
        """Integral of the CDF over [0, a]; piecewise cubic plus atom kinks."""
        if a <= 0.0:
            return 0.0
        a = min(a, 1.0)
        i = self._seg_index(a)
        acc = self._integrated_density_cdf_prefix[i]
        l, _, c0, c1 = self.density_segments[i]
        base = self._seg_cum_mass[i]
        # antiderivative of base + c0*(t-l) + c1*(t^2-l^2)/2 from l to a
        w = a - l
        acc += base * w + 0.5 * c0 * w * w + 0.5 * c1 * (
            (a**3 - l**3) / 3.0 - l * l * w
        )
        for loc, m in self.atoms:
            if loc >= a:
                break
            acc += m * (a - loc)
        return acc

    @cached_property
    def _integrated_density_cdf_prefix(self):
        acc, out = 0.0, []
        for i, (l, r, c0, c1) in enumerate(self.density_segments):
            out.append(acc)
            base = self._seg_cum_mass[i]
            w = r - l
            acc += base * w + 0.5 * c0 * w * w + 0.5 * c1 * (
                (r**3 - l**3) / 3.0 - l * l * w
            )
        out.append(acc)
        return out

    def cdf_inverse(self, level: float, lo: float = 0.0, hi: float = 1.0) -> float:
        """Smallest x with cdf(x) >= level, clipped into [lo, hi].

        The CDF is piecewise quadratic between breakpoints with jumps at
        atoms, so each piece is solved in closed form.
        """
        if level <= self.cdf(lo) + 1e-15:
            return lo
        if level >= self.cdf(hi):
            return hi
        pts = self.breakpoints
        prev = 0.0
        for pt in pts + (1.0,):
            if pt <= prev:
                continue
            f_prev = self.cdf(prev)
            f_at = self.density_mass_below(pt) + self._atom_cum[
                self._atom_index(pt, False)
            ]  # limit from the left at pt
            if level <= f_at + 1e-15:
                # crossing happens inside the density stretch (prev, pt)
                i = self._seg_index(prev)
                l, _, c0, c1 = self.density_segments[i]
                delta = level - f_prev
                x = _solve_affine_mass(prev, pt, c0, c1, delta)
                return min(max(x, lo), hi)
            if level <= self.cdf(pt) + 1e-15:
                return min(max(pt, lo), hi)
            prev = pt
        return hi

    def prefix_tables(self, points):
        """Cumulative mass/moment of [0, x) at each grid point, left-closed.

        Atoms exactly at an interior grid point belong to the cell on its
        right; the terminal entry covers the closed interval up to 1 so the
        final cell picks up an atom at 1.
        """
        pts = np.asarray(points, dtype=float)
        n = pts.size
        p0 = np.empty(n)
        p1 = np.empty(n)
        for i, x in enumerate(pts):
            j = self._atom_index(float(x), False)
            p0[i] = self.density_mass_below(float(x)) + self._atom_cum[j]
            p1[i] = self.density_moment_below(float(x)) + self._atom_moment_cum[j]
        p0[-1] = self._density_total + self._atom_total
        p1[-1] = self._seg_cum_moment[-1] + self._atom_moment_cum[-1]
        return p0, p1


def _solve_affine_mass(x0, x1, c0, c1, delta):
    """x in [x0, x1] with integral of (c0 + c1 t) over [x0, x] equal to delta."""
    if delta <= 0.0:
        return x0
    if abs(c1) < 1e-14:
        if c0 <= 0.0:
            return x1
        return min(x0 + delta / c0, x1)
    # 0.5*c1*x^2 + c0*x = R with R matching the mass at the unknown endpoint
    r = 0.5 * c1 * x0 * x0 + c0 * x0 + delta
    disc = c0 * c0 + 2.0 * c1 * r
    if disc < 0.0:
        return x1
    root = (-c0 + math.sqrt(disc)) / c1
    if x0 - 1e-12 <= root <= x1 + 1e-12:
        return min(max(root, x0), x1)
    root = (-c0 - math.sqrt(disc)) / c1
    return min(max(root, x0), x1)


# ---------------------------------------------------------------------------
# interim utilities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Utility:
    """Interim utility: piecewise-linear base plus point spikes.

    ``base_segments`` is an ordered tuple of ``(left, right, value_left,
    value_right)`` pieces tiling [0, 1]; a piece owns its left endpoint and
    the final piece also owns 1.  ``spikes`` is a tuple of ``(location,
    value)`` overriding the base exactly at (and within ``SNAP_TOL`` of) the
    location.  When ``lipschitz`` is set it must bound every base slope and
    spikes are disallowed.
    """

    base_segments: tuple
    spikes: tuple = ()
    lipschitz: float | None = None
    ubound: float = 1.0

    def __post_init__(self):
        segs = tuple(
            (float(l), float(r), float(vl), float(vr))
            for (l, r, vl, vr) in self.base_segments
        )
        spikes = tuple((float(x), float(v)) for (x, v) in self.spikes)
        object.__setattr__(self, "base_segments", segs)
        object.__setattr__(self, "spikes", spikes)
        if self.lipschitz is not None:
            object.__setattr__(self, "lipschitz", float(self.lipschitz))
        object.__setattr__(self, "ubound", float(self.ubound))
        self._validate()

    def _validate(self):
        if not self.base_segments:
            raise DomainError("utility needs at least one base segment")
        prev_right = 0.0
        for l, r, vl, vr in self.base_segments:
            if abs(l - prev_right) > MASS_TOL:
                raise DomainError(f"base segments must tile [0, 1]; gap at {prev_right}")
            if r <= l:
                raise DomainError("base segment must have positive width")
            for v in (vl, vr):
                if v < -MASS_TOL or v > self.ubound + 1e-9:
                    raise DomainError(
                        f"base value {v} outside [0, {self.ubound}]"
                    )
            prev_right = r
        if abs(prev_right - 1.0) > MASS_TOL:
            raise DomainError("base segments must end at 1")
        prev_loc = -1.0
        for x, v in self.spikes:
            if not 0.0 <= x <= 1.0:
                raise DomainError("spike locations must lie in [0, 1]")
            if x - prev_loc <= 2 * SNAP_TOL:
                raise DomainError("spike locations closer than the snap width")
            if v < -MASS_TOL or v > self.ubound + 1e-9:
                raise DomainError(f"spike value {v} outside [0, {self.ubound}]")
            prev_loc = x
        if self.lipschitz is not None:
            if self.spikes:
                raise DomainError("the Lipschitz flag is incompatible with spikes")
            if self.max_slope > self.lipschitz + 1e-9:
                raise DomainError(
                    f"declared Lipschitz bound {self.lipschitz} below actual "
                    f"max slope {self.max_slope}"
                )

    @staticmethod
    def piecewise_constant(pieces, spikes=(), ubound: float = 1.0,
                           lipschitz: float | None = None) -> "Utility":
        """Build from ``(left, right, value)`` constant pieces."""
        segs = tuple((l, r, v, v) for (l, r, v) in pieces)
        return Utility(segs, tuple(spikes), lipschitz, ubound)

    @staticmethod
    def zero_with_spikes(spikes, ubound: float = 1.0) -> "Utility":
        return Utility(((0.0, 1.0, 0.0, 0.0),), tuple(spikes), None, ubound)

    @cached_property
    def _lefts(self):
        return [s[0] for s in self.base_segments]

    @cached_property
    def _slopes(self):
        return [(vr - vl) / (r - l) for (l, r, vl, vr) in self.base_segments]

    @cached_property
    def _spike_locs(self):
        return [s[0] for s in self.spikes]

    @cached_property
    def max_slope(self) -> float:
        return max(abs(s) for s in self._slopes)

    @cached_property
    def breakpoints(self):
        pts = {s[0] for s in self.base_segments} | {1.0}
        return tuple(sorted(pts))

    def base_value(self, mu: float) -> float:
        i = min(max(bisect.bisect_right(self._lefts, mu) - 1, 0),
                len(self.base_segments) - 1)
        l, _, vl, _ = self.base_segments[i]
        return vl + self._slopes[i] * (mu - l)

    def eval(self, mu: float) -> float:
        if not -SNAP_TOL <= mu <= 1.0 + SNAP_TOL:
            raise DomainError(f"posterior mean {mu} outside [0, 1]")
        mu = min(max(mu, 0.0), 1.0)
        if self.spikes:
            i = bisect.bisect_left(self._spike_locs, mu)
            for j in (i - 1, i):
                if 0 <= j < len(self.spikes) and abs(mu - self.spikes[j][0]) <= SNAP_TOL:
                    return self.spikes[j][1]
        return self.base_value(mu)

    def eval_array(self, mus: np.ndarray) -> np.ndarray:
        mus = np.clip(np.asarray(mus, dtype=float), 0.0, 1.0)
        lefts = np.asarray(self._lefts)
        idx = np.clip(np.searchsorted(lefts, mus, side="right") - 1, 0,
                      len(self.base_segments) - 1)
        vl = np.asarray([s[2] for s in self.base_segments])[idx]
        sl = np.asarray(self._slopes)[idx]
        out = vl + sl * (mus - lefts[idx])
        if self.spikes:
            locs = np.asarray(self._spike_locs)
            vals = np.asarray([s[1] for s in self.spikes])
            pos = np.searchsorted(locs, mus)
            for shift in (-1, 0):
                j = np.clip(pos + shift, 0, len(locs) - 1)
                hit = np.abs(mus - locs[j]) <= SNAP_TOL
                out = np.where(hit, vals[j], out)
        return out


@dataclass(frozen=True)
class Instance:
    """A prior and an interim utility over the same unit state space."""

    prior: Prior
    utility: Utility
    label: str = ""


# ---------------------------------------------------------------------------
# spec-level operations
# ---------------------------------------------------------------------------


def interval_mass(prior: Prior, a: float, b: float, closed_left: bool = True,
                  closed_right: bool = True) -> float:
    """Prior probability of [a, b], endpoint atoms included per the flags."""
    return prior.mass(a, b, closed_left, closed_right)


def interval_mean(prior: Prior, a: float, b: float, closed_left: bool = True,
                  closed_right: bool = True) -> float:
    """Conditional mean of the state on [a, b]; raises on zero-mass intervals."""
    return prior.mean(a, b, closed_left, closed_right)


def utility_eval(utility: Utility, mu: float) -> float:
    """Utility at posterior mean ``mu``; spikes within SNAP_TOL take over."""
    return utility.eval(mu)


def solve_right_endpoint(prior: Prior, b: float, target_mean: float,
                         tol: float = ROOT_TOL) -> float:
    """Find c > b with conditional mean of [b, c] equal to ``target_mean``.

    The conditional mean is nondecreasing in c (strictly, for full-support
    densities), so bisection is robust; the uniform prior short-circuits to
    the closed-form midpoint answer.
    """
    if not 0.0 <= b < 1.0:
        raise DomainError(f"left endpoint {b} must lie in [0, 1)")
    if target_mean <= b:
        raise DomainError(f"target mean {target_mean} must exceed {b}")
    reachable = prior.mean(b, 1.0)
    if target_mean > reachable + tol:
        raise InfeasibleTargetError(
            f"mean of [{b}, 1] is {reachable}, below target {target_mean}"
        )
    if prior.is_uniform:
        return min(2.0 * target_mean - b, 1.0)
    lo, hi = b, 1.0
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if prior.mass(b, mid) <= _ZERO_MASS:
            g = b - target_mean
        else:
            g = prior.mean(b, mid) - target_mean
        if abs(g) <= tol:
            return mid
        if g < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-17:
            break
    c = hi
    if prior.mass(b, c) > _ZERO_MASS and abs(prior.mean(b, c) - target_mean) <= 1e3 * tol:
        return c
    raise SolverToleranceError(
        f"no c with mean of [{b}, c] within {tol} of {target_mean}; the prior "
        "may carry an atom across the target"
    )


def solve_left_endpoint(prior: Prior, b_right: float, target_mean: float,
                        tol: float = ROOT_TOL) -> float:
    """Mirror of :func:`solve_right_endpoint`: mean of [c, b_right] = target."""
    if not 0.0 < b_right <= 1.0:
        raise DomainError(f"right endpoint {b_right} must lie in (0, 1]")
    if target_mean >= b_right:
        raise DomainError(f"target mean {target_mean} must fall below {b_right}")
    reachable = prior.mean(0.0, b_right)
    if target_mean < reachable - tol:
        raise InfeasibleTargetError(
            f"mean of [0, {b_right}] is {reachable}, above target {target_mean}"
        )
    if prior.is_uniform:
        return max(2.0 * target_mean - b_right, 0.0)
    lo, hi = 0.0, b_right
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if prior.mass(mid, b_right) <= _ZERO_MASS:
            g = b_right - target_mean
        else:
            g = prior.mean(mid, b_right) - target_mean
        if abs(g) <= tol:
            return mid
        if g < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-17:
            break
    c = lo
    if prior.mass(c, b_right) > _ZERO_MASS and abs(
        prior.mean(c, b_right) - target_mean
    ) <= 1e3 * tol:
        return c
    raise SolverToleranceError(
        f"no c with mean of [c, {b_right}] within {tol} of {target_mean}; the "
        "prior may carry an atom across the target"
    )

"""Interval statistics, root solvers, and utility evaluation.

Derived expectations come from independent oracles: quadrature for the
affine-density prior and the analytic uniform midpoint formulas for the root
solvers.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from persuade import (
    DegenerateIntervalError,
    DomainError,
    InfeasibleTargetError,
    Instance,
    Prior,
    Utility,
    interval_mass,
    interval_mean,
    solve_left_endpoint,
    solve_right_endpoint,
    utility_eval,
)
from persuade.analysis import builtin_instance, tight_instance


@pytest.fixture(scope="module")
def uniform():
    return Prior.uniform()


@pytest.fixture(scope="module")
def tilted():
    return Prior.affine(1.2)


@pytest.fixture(scope="module")
def tight04():
    return tight_instance(0.4).prior


class TestIntervalMass:
    def test_uniform_is_length(self, uniform):
        assert interval_mass(uniform, 0.25, 0.75) == pytest.approx(0.5, abs=1e-12)

    def test_atomic_sums_included_atoms(self, tight04):
        assert interval_mass(tight04, 0.0, 0.5, True, True) == pytest.approx(
            0.6, abs=1e-12)

    def test_zero_length_continuous(self, uniform):
        assert interval_mass(uniform, 0.3, 0.3) == 0.0

    def test_closedness_flags_control_atoms(self, tight04):
        assert interval_mass(tight04, 0.0, 0.5, True, False) == pytest.approx(
            0.4, abs=1e-12)
        assert interval_mass(tight04, 0.5, 1.0, False, False) == pytest.approx(
            0.0, abs=1e-12)

    def test_rejects_bad_domain(self, uniform):
        with pytest.raises(DomainError):
            interval_mass(uniform, 0.7, 0.2)
        with pytest.raises(DomainError):
            interval_mass(uniform, 0.0, 1.2)

    def test_quadrature_oracle_affine(self, tilted):
        f = lambda x: 0.4 + 1.2 * x
        for a, b in [(0.0, 1.0), (0.1, 0.35), (0.5, 0.99)]:
            expected, _ = integrate.quad(f, a, b)
            assert interval_mass(tilted, a, b) == pytest.approx(expected, abs=1e-10)


class TestIntervalMean:
    def test_uniform_midpoint(self, uniform):
        assert interval_mean(uniform, 0.0, 2.0 / 3.0) == pytest.approx(
            1.0 / 3.0, abs=1e-12)
        assert interval_mean(uniform, 1.0 / 12.0, 7.0 / 12.0) == pytest.approx(
            1.0 / 3.0, abs=1e-12)

    def test_atomic_lower_pair(self, tight04):
        # (0 * 0.4 + 0.5 * 0.2) / 0.6
        assert interval_mean(tight04, 0.0, 0.5) == pytest.approx(1.0 / 6.0,
                                                                abs=1e-12)

    def test_zero_mass_interval_rejected(self, uniform):
        with pytest.raises(DegenerateIntervalError):
            interval_mean(uniform, 0.3, 0.3)

    def test_quadrature_oracle_affine(self, tilted):
        f = lambda x: 0.4 + 1.2 * x
        for a, b in [(0.0, 1.0), (0.2, 0.45), (0.6, 1.0)]:
            num, _ = integrate.quad(lambda x: x * f(x), a, b)
            den, _ = integrate.quad(f, a, b)
            assert interval_mean(tilted, a, b) == pytest.approx(num / den,
                                                                abs=1e-10)

    def test_integrated_cdf_quadrature(self, tilted):
        for a in (0.15, 0.5, 0.92, 1.0):
            expected, _ = integrate.quad(tilted.cdf, 0.0, a)
            assert tilted.integrated_cdf(a) == pytest.approx(expected, abs=1e-9)

    def test_cdf_inverse_round_trip(self, tilted):
        for level in (0.05, 0.3, 0.77, 0.99):
            x = tilted.cdf_inverse(level)
            assert tilted.cdf(x) == pytest.approx(level, abs=1e-9)


class TestRootSolvers:
    def test_uniform_right_closed_form(self, uniform):
        assert solve_right_endpoint(uniform, 0.0, 1.0 / 3.0) == pytest.approx(
            2.0 / 3.0, abs=1e-12)
        assert solve_right_endpoint(uniform, 0.2, 0.45) == pytest.approx(
            0.7, abs=1e-12)

    def test_right_infeasible_target(self, uniform):
        with pytest.raises(InfeasibleTargetError):
            solve_right_endpoint(uniform, 0.0, 0.9)

    def test_uniform_left_closed_form(self, uniform):
        assert solve_left_endpoint(uniform, 1.0, 2.0 / 3.0) == pytest.approx(
            1.0 / 3.0, abs=1e-12)
        assert solve_left_endpoint(uniform, 0.6, 0.5) == pytest.approx(
            0.4, abs=1e-12)

    def test_left_infeasible_target(self, uniform):
        with pytest.raises(InfeasibleTargetError):
            solve_left_endpoint(uniform, 1.0, 0.3)

    def test_bisection_round_trip_affine(self, tilted):
        for b, target in [(0.0, 0.4), (0.25, 0.5), (0.5, 0.75)]:
            c = solve_right_endpoint(tilted, b, target)
            assert tilted.mean(b, c) == pytest.approx(target, abs=1e-9)
        for b, target in [(1.0, 0.7), (0.8, 0.55)]:
            c = solve_left_endpoint(tilted, b, target)
            assert tilted.mean(c, b) == pytest.approx(target, abs=1e-9)

    def test_preconditions(self, uniform):
        with pytest.raises(DomainError):
            solve_right_endpoint(uniform, 0.5, 0.4)
        with pytest.raises(DomainError):
            solve_left_endpoint(uniform, 0.5, 0.6)


class TestUtilityEval:
    def test_spikes_override_base(self):
        u = builtin_instance("example_2_1").utility
        assert utility_eval(u, 1.0 / 3.0) == 1.0
        assert utility_eval(u, 0.5) == 0.0
        assert utility_eval(u, 1.0 / 3.0 + 5e-10) == 1.0  # snapped

    def test_step_utility(self):
        u = builtin_instance("example_1_1").utility
        assert utility_eval(u, 0.5) == pytest.approx(0.9)
        assert utility_eval(u, 0.8) == pytest.approx(1.0)
        assert utility_eval(u, 0.4) == pytest.approx(0.9)
        assert utility_eval(u, 0.39999) == pytest.approx(0.0)

    def test_eval_array_matches_scalar(self):
        u = Utility(((0.0, 0.5, 0.2, 0.7), (0.5, 1.0, 0.1, 0.1)),
                    spikes=((0.25, 0.9),))
        mus = np.linspace(0.0, 1.0, 101)
        vec = u.eval_array(mus)
        assert vec == pytest.approx([u.eval(m) for m in mus], abs=0)

    def test_lipschitz_flag_validation(self):
        with pytest.raises(DomainError):
            Utility(((0.0, 1.0, 0.0, 1.0),), lipschitz=0.5)
        with pytest.raises(DomainError):
            Utility(((0.0, 1.0, 0.0, 0.0),), spikes=((0.5, 1.0),), lipschitz=1.0)

    def test_lipschitz_bound_holds_on_samples(self):
        u = Utility(((0.0, 0.5, 0.1, 0.9), (0.5, 1.0, 0.9, 0.2)), lipschitz=1.6)
        rng = np.random.default_rng(7)
        xs, ys = rng.uniform(0, 1, 200), rng.uniform(0, 1, 200)
        for x, y in zip(xs, ys):
            assert abs(u.eval(x) - u.eval(y)) <= 1.6 * abs(x - y) + 1e-12


class TestPriorValidation:
    def test_mass_must_sum_to_one(self):
        with pytest.raises(DomainError):
            Prior(((0.0, 1.0, 0.5, 0.0),))

    def test_atoms_must_increase(self):
        with pytest.raises(DomainError):
            Prior.from_atoms(((0.5, 0.5), (0.5, 0.5)))

    def test_negative_density_rejected(self):
        with pytest.raises(DomainError):
            Prior(((0.0, 1.0, -0.5, 3.0),))


_mixed_prior = Prior(
    ((0.0, 0.5, 0.8, 0.4), (0.5, 1.0, 0.2, 0.4)),
    atoms=((0.25, 0.2), (0.5, 0.1)),
)


@settings(max_examples=80, deadline=None)
@given(st.tuples(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1)))
def test_mass_additivity(points):
    a, b, c = sorted(points)
    left = _mixed_prior.mass(a, b, True, False)
    right = _mixed_prior.mass(b, c, True, False)
    both = _mixed_prior.mass(a, c, True, False)
    assert both == pytest.approx(left + right, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_mean_monotone_in_right_endpoint(b1, b2):
    lo, hi = sorted((b1, b2))
    if _mixed_prior.mass(0.0, lo) <= 1e-12:
        return
    assert _mixed_prior.mean(0.0, lo) <= _mixed_prior.mean(0.0, hi) + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 0.8), st.floats(0.05, 0.95))
def test_solve_right_round_trip(b, frac):
    prior = Prior.affine(-0.9)
    top = prior.mean(b, 1.0)
    target = b + frac * (top - b)
    if target <= b + 1e-6:
        return
    c = solve_right_endpoint(prior, b, target)
    assert prior.mean(b, c) == pytest.approx(target, abs=1e-8)

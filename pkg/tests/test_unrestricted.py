"""Bi-pooling solver and the atomic-prior enumeration oracle."""

import pytest

from persuade import (
    BudgetExceededError,
    DomainError,
    Instance,
    Prior,
    Utility,
    best_two_signal,
    brute_force_unrestricted,
    check_mpc,
    default_grid,
    evaluate_bipooling,
    induced_mean_distribution,
    solve_bipooling_dp,
    solve_partitional_dp,
)
from persuade.analysis import builtin_instance, random_instance, tight_instance

from helpers import rng_for, shaped_pl_utility


@pytest.fixture(scope="module")
def e21():
    return builtin_instance("example_2_1")


def concave_hump():
    # piecewise-linear bridge of x(1-x) with a kink at the prior mean
    segs = ((0.0, 0.25, 0.0, 3.0 / 16.0), (0.25, 0.5, 3.0 / 16.0, 0.25),
            (0.5, 0.75, 0.25, 3.0 / 16.0), (0.75, 1.0, 3.0 / 16.0, 0.0))
    return Instance(Prior.uniform(), Utility(segs))


class TestBestTwoSignal:
    def test_finds_the_spike_pair(self, e21):
        choice = best_two_signal(e21, 0.0, 1.0, [1.0 / 3.0, 2.0 / 3.0])
        assert choice is not None
        assert choice.mu1 == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert choice.mu2 == pytest.approx(2.0 / 3.0, abs=1e-12)
        assert choice.value == pytest.approx(1.0, abs=1e-12)

    def test_linear_utility_never_splits(self):
        inst = Instance(Prior.uniform(), Utility(((0.0, 1.0, 0.0, 1.0),)))
        assert best_two_signal(inst, 0.0, 1.0, [0.2, 0.4, 0.6, 0.8]) is None

    def test_no_bracketing_pair(self, e21):
        # conditional mean of [0, 1/2] is 1/4; the lone candidate sits above it
        assert best_two_signal(e21, 0.0, 0.5, [1.0 / 3.0]) is None


class TestSolveBipooling:
    def test_two_spike_instance_reaches_one(self, e21):
        policy, value = solve_bipooling_dp(e21, 2, default_grid(e21, 0.25))
        assert value == pytest.approx(1.0, abs=1e-12)
        assert policy.num_signals == 2
        assert evaluate_bipooling(e21, policy) == pytest.approx(value, abs=1e-9)

    def test_atomic_tight_instance_reaches_one(self):
        inst = tight_instance(0.4)
        policy, value = solve_bipooling_dp(inst, 2, default_grid(inst, 0.25))
        assert value == pytest.approx(1.0, abs=1e-9)
        seg = policy.segments[0]
        assert seg.is_two_signal
        assert seg.mu1 == pytest.approx(1.0 / 6.0, abs=1e-9)
        assert seg.mu2 == pytest.approx(5.0 / 6.0, abs=1e-9)

    def test_concave_full_pooling(self):
        inst = concave_hump()
        _, value = solve_bipooling_dp(inst, 3, default_grid(inst, 0.25))
        assert value == pytest.approx(0.25, abs=1e-12)

    def test_budget_respected_and_valid(self):
        rng = rng_for(314)
        for _ in range(15):
            inst = random_instance(rng)
            k = int(rng.integers(1, 5))
            policy, value = solve_bipooling_dp(inst, k, default_grid(inst, 0.2))
            assert policy.num_signals <= k
            assert evaluate_bipooling(inst, policy) == pytest.approx(value,
                                                                     abs=1e-9)
            report = check_mpc(inst.prior,
                               induced_mean_distribution(inst, policy))
            assert report.passed, report

    def test_sandwich_against_partitional(self):
        rng = rng_for(272)
        for _ in range(12):
            inst = random_instance(rng)
            grid = default_grid(inst, 0.2)
            for k in (1, 2, 3):
                _, part = solve_partitional_dp(inst, k, grid)
                _, full = solve_bipooling_dp(inst, k, grid)
                assert part - 1e-12 <= full <= inst.utility.ubound + 1e-12


class TestShapedUtilities:
    def test_concave_equals_no_information(self):
        rng = rng_for(61)
        for trial in range(10):
            utility = shaped_pl_utility(rng, convex=False)
            inst = Instance(Prior.uniform(), utility)
            _, value = solve_bipooling_dp(inst, 3, default_grid(inst, 0.1))
            assert value == pytest.approx(utility.eval(0.5), abs=1e-9), trial

    def test_convex_solution_is_partitional(self):
        rng = rng_for(62)
        for trial in range(10):
            utility = shaped_pl_utility(rng, convex=True)
            inst = Instance(Prior.uniform(), utility)
            grid = default_grid(inst, 0.1)
            for k in (2, 3):
                policy, value = solve_bipooling_dp(inst, k, grid)
                _, part = solve_partitional_dp(inst, k, grid)
                assert all(not s.is_two_signal for s in policy.segments), trial
                assert value == pytest.approx(part, abs=1e-9), trial


class TestBruteForceUnrestricted:
    def test_tight_family_reaches_one(self):
        inst = tight_instance(0.4)
        value = brute_force_unrestricted(inst.prior, inst.utility, 2, 120)
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_tight_family_monotone_cap(self):
        inst = tight_instance(0.4)
        value = brute_force_unrestricted(inst.prior, inst.utility, 2, 120,
                                         monotone_splits=True)
        assert value == pytest.approx(0.6, abs=1e-12)

    def test_single_atom_single_signal(self):
        prior = Prior.from_atoms(((0.5, 1.0),))
        utility = Utility.zero_with_spikes(((0.5, 1.0),))
        assert brute_force_unrestricted(prior, utility, 1, 10) == pytest.approx(
            1.0, abs=1e-12)

    def test_monotone_never_beats_unrestricted(self):
        rng = rng_for(88)
        for _ in range(10):
            masses = rng.dirichlet((1.0, 1.0, 1.0))
            prior = Prior.from_atoms(
                ((0.0, masses[0]), (0.5, masses[1]), (1.0, masses[2])))
            utility = Utility.zero_with_spikes(
                tuple((float(x), 1.0) for x in sorted(rng.uniform(0.1, 0.9, 2))))
            free = brute_force_unrestricted(prior, utility, 2, 60)
            mono = brute_force_unrestricted(prior, utility, 2, 60,
                                            monotone_splits=True)
            assert mono <= free + 1e-9

    def test_guards(self):
        inst = tight_instance(0.3)
        with pytest.raises(DomainError):
            brute_force_unrestricted(Prior.uniform(), inst.utility, 2, 50)
        with pytest.raises(DomainError):
            brute_force_unrestricted(inst.prior, inst.utility, 3, 50)
        with pytest.raises(BudgetExceededError):
            brute_force_unrestricted(inst.prior, inst.utility, 2, 500)

"""Partitional DP: spec examples, exact oracle agreement, and the additive
error bound of the grid restriction."""

import numpy as np
import pytest

from persuade import (
    BudgetExceededError,
    DomainError,
    DpGrid,
    Instance,
    PartitionalPolicy,
    Prior,
    Utility,
    brute_force_partitional,
    default_grid,
    evaluate_partitional,
    solve_partitional_dp,
)
from persuade.analysis import builtin_instance, random_instance

from helpers import rng_for


@pytest.fixture(scope="module")
def e21():
    return builtin_instance("example_2_1")


@pytest.fixture(scope="module")
def e11():
    return builtin_instance("example_1_1")


def small_grid():
    return DpGrid.from_points(
        (1.0 / 6.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 5.0 / 6.0))


class TestDefaultGrid:
    def test_uniform_quarters(self):
        inst = Instance(Prior.uniform(), Utility(((0.0, 1.0, 0.3, 0.3),)))
        grid = default_grid(inst, 0.25)
        assert grid.points == (0.0, 0.25, 0.5, 0.75, 1.0)

    def test_spikes_and_mean_matching_cuts(self, e21):
        grid = default_grid(e21, 0.25)
        for needed in (1.0 / 3.0, 2.0 / 3.0):
            assert any(abs(p - needed) < 1e-12 for p in grid.points)

    def test_endpoints_only(self):
        inst = Instance(Prior.uniform(), Utility(((0.0, 1.0, 0.3, 0.3),)))
        assert default_grid(inst, 1.0).points == (0.0, 1.0)

    def test_epsilon_validated(self, e21):
        with pytest.raises(DomainError):
            default_grid(e21, 0.0)


class TestSolveExamples:
    def test_two_spike_budget_two(self, e21):
        grid = default_grid(e21, 0.25)
        policy, value = solve_partitional_dp(e21, 2, grid)
        assert value == pytest.approx(2.0 / 3.0, abs=1e-12)
        assert evaluate_partitional(e21, policy) == pytest.approx(value, abs=1e-9)

    def test_linear_utility_any_budget(self):
        inst = Instance(Prior.uniform(), Utility(((0.0, 1.0, 0.0, 1.0),)))
        grid = default_grid(inst, 0.1)
        for k in (1, 2, 5):
            _, value = solve_partitional_dp(inst, k, grid)
            assert value == pytest.approx(0.5, abs=1e-12)

    def test_step_utility_best_cut(self, e11):
        grid = default_grid(e11, 0.01)
        policy, value = solve_partitional_dp(e11, 2, grid)
        assert value == pytest.approx(0.92, abs=1e-12)
        assert policy.cuts == (0.8,)

    def test_budget_zero_rejected(self, e21):
        with pytest.raises(DomainError):
            solve_partitional_dp(e21, 0, default_grid(e21, 0.5))


class TestBruteForce:
    def test_two_spike_small_grid(self, e21):
        assert brute_force_partitional(e21, 2, small_grid()) == pytest.approx(
            2.0 / 3.0, abs=1e-12)
        assert brute_force_partitional(e21, 4, small_grid()) == pytest.approx(
            2.0 / 3.0, abs=1e-12)

    def test_budget_one_is_full_pooling(self, e11):
        assert brute_force_partitional(e11, 1, small_grid()) == pytest.approx(
            0.9, abs=1e-12)

    def test_enumeration_budget_guard(self, e21):
        grid = default_grid(e21, 0.002)
        with pytest.raises(BudgetExceededError):
            brute_force_partitional(e21, 5, grid)

    def test_matches_dp_exactly(self, subtests=None):
        rng = rng_for(404)
        for trial in range(12):
            inst = random_instance(rng)
            points = np.sort(rng.uniform(0.02, 0.98,
                                         size=int(rng.integers(4, 15))))
            grid = DpGrid.from_points(points)
            k = int(rng.integers(1, 5))
            _, dp_value = solve_partitional_dp(inst, k, grid)
            oracle = brute_force_partitional(inst, k, grid)
            assert dp_value == oracle, f"trial {trial}: {dp_value} != {oracle}"


class TestMonotonicity:
    def test_value_nondecreasing_in_budget(self, e11):
        grid = default_grid(e11, 0.05)
        values = [solve_partitional_dp(e11, k, grid)[1] for k in range(1, 6)]
        assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))

    def test_grid_refinement_never_hurts(self):
        rng = rng_for(11)
        for _ in range(8):
            inst = random_instance(rng)
            coarse = default_grid(inst, 0.2)
            fine = coarse.with_extra(rng.uniform(0.01, 0.99, size=6))
            for k in (2, 3):
                _, v_coarse = solve_partitional_dp(inst, k, coarse)
                _, v_fine = solve_partitional_dp(inst, k, fine)
                assert v_fine >= v_coarse - 1e-12


class TestLipschitzBounds:
    def test_cut_value_function_is_lipschitz(self):
        # value change of a cut vector is bounded by 2 * fbar * (U + L) * l1
        rng = rng_for(2024)
        for _ in range(10):
            inst = random_instance(rng, lipschitz=True)
            fbar = inst.prior.max_density
            level = 2.0 * fbar * (inst.utility.ubound + inst.utility.lipschitz)
            cuts_a = np.sort(rng.uniform(0.05, 0.95, size=3))
            cuts_b = np.clip(cuts_a + rng.uniform(-0.04, 0.04, size=3), 0.0, 1.0)
            cuts_b = np.sort(cuts_b)
            va = evaluate_partitional(inst, PartitionalPolicy(tuple(cuts_a)))
            vb = evaluate_partitional(inst, PartitionalPolicy(tuple(cuts_b)))
            l1 = float(np.abs(cuts_a - cuts_b).sum())
            assert abs(va - vb) <= level * l1 + 1e-9

    def test_grid_error_bound(self):
        rng = rng_for(99)
        for trial in range(6):
            inst = random_instance(rng, lipschitz=True)
            k = int(rng.integers(2, 5))
            eps = 0.05
            fbar = inst.prior.max_density
            bound = 2.0 * fbar * (inst.utility.ubound + inst.utility.lipschitz) \
                * k * eps
            _, coarse = solve_partitional_dp(inst, k, default_grid(inst, eps))
            _, fine = solve_partitional_dp(inst, k, default_grid(inst, eps / 8))
            assert coarse >= fine - bound - 1e-9, f"trial {trial}"

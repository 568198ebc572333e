"""Tests for basis pursuit, the l0 oracle, and the success-rate sweep."""

import numpy as np
import pytest

from sparsethresh import (
    BpSolverConfig,
    CoefficientSpec,
    HybridSupportSpec,
    PartitionedDictionary,
    brute_force_l0,
    derive_rng,
    recovery_trial,
    run_recovery_sweep,
    sample_instance,
    solve_bp,
)
from sparsethresh.recovery import RECOVERY_CSV_HEADER, SUCCESS_REL_ERROR

TOL = 1e-12


def _planted(D, support, values):
    x = np.zeros(D.N if isinstance(D, PartitionedDictionary) else D.shape[1], dtype=complex)
    x[list(support)] = values
    mat = D.matrix if isinstance(D, PartitionedDictionary) else D
    return x, mat @ x


# ==============================
# solver
# ==============================


class TestBpSolverConfig:
    def test_defaults(self):
        cfg = BpSolverConfig()
        assert cfg.step_parameter == 1.0
        assert cfg.max_iterations == 100_000

    def test_validation(self):
        with pytest.raises(ValueError):
            BpSolverConfig(step_parameter=0.0)
        with pytest.raises(ValueError):
            BpSolverConfig(max_iterations=0)
        with pytest.raises(ValueError):
            BpSolverConfig(primal_tolerance=-1e-8)


class TestSolveBp:
    def test_identity_returns_the_data(self):
        rng = derive_rng(1)
        y = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        out = solve_bp(np.eye(6), y, x_true=y)
        assert out.converged
        assert out.relative_l2_error <= 1e-6
        assert out.feasibility_residual <= 1e-8

    def test_zero_data_is_immediate(self):
        out = solve_bp(np.eye(4), np.zeros(4), x_true=np.zeros(4))
        assert out.converged
        assert out.iterations == 1
        assert np.all(out.x_hat == 0)
        assert out.l1_value == 0.0
        assert out.relative_l2_error == 0.0
        assert out.success

    def test_single_atom(self, two_onb4):
        x_true, y = _planted(two_onb4, (2,), [1.0])
        out = solve_bp(two_onb4, y, x_true=x_true)
        assert out.success
        assert out.support_match is True
        assert out.l1_value <= 1.0 + 1e-6

    def test_two_atoms_across_blocks(self, two_onb8):
        rng = derive_rng(4)
        vals = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        x_true, y = _planted(two_onb8, (1, 11), vals)
        out = solve_bp(two_onb8, y, x_true=x_true)
        assert out.success
        assert out.relative_l2_error <= 1e-6
        assert out.support_match is True

    def test_unconverged_iterate_is_still_feasible(self, two_onb8):
        x_true, y = _planted(two_onb8, (0, 5, 10), [1.0, 1.0, 1.0])
        out = solve_bp(two_onb8, y, cfg=BpSolverConfig(max_iterations=2))
        assert not out.converged
        assert out.iterations == 2
        assert out.feasibility_residual <= 1e-10

    def test_phase_equivariance(self, two_onb8):
        rng = derive_rng(8)
        vals = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        x_true, y = _planted(two_onb8, (3, 9), vals)
        phase = np.exp(1j * 1.234)
        base = solve_bp(two_onb8, y)
        rotated = solve_bp(two_onb8, phase * y)
        assert np.max(np.abs(rotated.x_hat - phase * base.x_hat)) <= 1e-7

    def test_success_requires_reference(self, two_onb4):
        _, y = _planted(two_onb4, (0,), [1.0])
        out = solve_bp(two_onb4, y)
        assert out.relative_l2_error is None
        assert out.support_match is None
        assert not out.success        # no reference, no success claim

    def test_rejects_bad_data(self, two_onb4):
        with pytest.raises(ValueError, match="length"):
            solve_bp(two_onb4, np.zeros(5))
        with pytest.raises(ValueError, match="finite"):
            solve_bp(two_onb4, np.array([np.nan, 0, 0, 0]))


# ==============================
# l0 oracle
# ==============================


class TestBruteForceL0:
    def test_single_atom(self, two_onb4):
        out = brute_force_l0(two_onb4, two_onb4.matrix[:, 3], k_max=2)
        assert out.k == 1
        assert out.supports == ((3,),)
        assert out.unique

    def test_zero_data(self, two_onb4):
        out = brute_force_l0(two_onb4, np.zeros(4), k_max=2)
        assert out.k == 0
        assert out.supports == ((),)
        assert out.unique

    def test_planted_pair(self, two_onb4):
        rng = derive_rng(6)
        vals = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        x_true, y = _planted(two_onb4, (0, 1), vals)
        out = brute_force_l0(two_onb4, y, k_max=2)
        assert out.k == 2
        assert out.unique
        assert out.supports[0] == (0, 1)

    def test_nothing_fits_under_the_cap(self, two_onb8):
        _, y = _planted(two_onb8, (0, 5, 10), [1.0, 1.0, 1.0])
        out = brute_force_l0(two_onb8, y, k_max=2)
        assert out.k is None
        assert out.supports == ()
        assert not out.unique

    def test_loose_tolerance_accepts_empty_support(self, two_onb4):
        out = brute_force_l0(two_onb4, two_onb4.matrix[:, 0], k_max=1, tol=10.0)
        assert out.k == 0

    def test_caps(self):
        from sparsethresh import build_random_dictionary
        wide = build_random_dictionary(4, 33, seed=0)
        with pytest.raises(ValueError, match="N <= 32"):
            brute_force_l0(wide, np.zeros(4), k_max=2)
        narrow = build_random_dictionary(4, 8, seed=0)
        with pytest.raises(ValueError, match="k_max <= 4"):
            brute_force_l0(narrow, np.zeros(4), k_max=5)
        with pytest.raises(ValueError, match="nonnegative"):
            brute_force_l0(narrow, np.zeros(4), k_max=-1)

    def test_rejects_bad_length(self, two_onb4):
        with pytest.raises(ValueError, match="length"):
            brute_force_l0(two_onb4, np.zeros(3), k_max=1)


class TestOracleAgreement:
    def test_solver_and_oracle_supports_coincide(self, two_onb8):
        budgets = ((0, 1), (1, 0), (1, 1), (0, 2), (2, 0))
        rng = derive_rng(13)
        checked = 0
        for t in range(40):
            n_a, n_b = budgets[t % len(budgets)]
            support_a = tuple(np.sort(rng.choice(8, size=n_a, replace=False))) if n_a else ()
            spec = HybridSupportSpec(support_a=support_a, n_b=n_b)
            inst = sample_instance(two_onb8, spec, rng=rng)
            out = solve_bp(two_onb8, inst.y, x_true=inst.x)
            assert out.success
            oracle = brute_force_l0(two_onb8, inst.y, k_max=2)
            if oracle.unique and out.support_match:
                assert oracle.supports[0] == inst.support
                checked += 1
        assert checked >= 30      # the certificate fires on most draws


# ==============================
# Monte Carlo trials and sweeps
# ==============================


class TestRecoveryTrial:
    def test_hybrid_instance_succeeds(self):
        D = PartitionedDictionary(np.eye(8), 4)
        out = recovery_trial(D, HybridSupportSpec((0, 2), 2, seed=5))
        assert out.success
        assert out.support_match is True

    def test_zero_budget(self, two_onb4):
        out = recovery_trial(two_onb4, HybridSupportSpec((), 0, seed=0))
        assert out.success
        assert out.relative_l2_error == 0.0

    def test_unit_law_warns(self, two_onb4):
        with pytest.warns(UserWarning, match="continuous"):
            out = recovery_trial(
                two_onb4, HybridSupportSpec((0,), 0, seed=1), CoefficientSpec("unit")
            )
        assert out.converged


class TestRecoverySweep:
    def test_small_grid_rates(self, two_onb4):
        grid = run_recovery_sweep(two_onb4, (0, 1), (0, 1), trials_per_cell=5, master_seed=3)
        assert grid.successes.shape == (2, 2, 2)
        assert np.all(grid.successes == 5)
        assert np.all(grid.rates == 1.0)

    def test_deterministic_rerun(self, two_onb4):
        a = run_recovery_sweep(two_onb4, (0, 1), (1, 2), trials_per_cell=4, master_seed=9)
        b = run_recovery_sweep(two_onb4, (0, 1), (1, 2), trials_per_cell=4, master_seed=9)
        np.testing.assert_array_equal(a.successes, b.successes)
        assert a.csv_rows() == b.csv_rows()

    def test_workers_do_not_change_counts(self, two_onb4):
        serial = run_recovery_sweep(two_onb4, (0, 1), (1,), trials_per_cell=4, master_seed=2)
        parallel = run_recovery_sweep(
            two_onb4, (0, 1), (1,), trials_per_cell=4, master_seed=2, workers=2
        )
        np.testing.assert_array_equal(serial.successes, parallel.successes)

    def test_rank_deficient_cell_fails(self, two_onb4):
        grid = run_recovery_sweep(
            two_onb4, (2,), (3,), trials_per_cell=5, master_seed=1,
            strategies=("first-n",), cfg=BpSolverConfig(max_iterations=2000),
        )
        assert float(grid.rates[0, 0, 0]) == 0.0

    def test_csv_layout(self, two_onb4):
        grid = run_recovery_sweep(two_onb4, (0, 1), (0, 1), trials_per_cell=5, master_seed=3)
        rows = grid.csv_rows()
        assert rows[0] == RECOVERY_CSV_HEADER
        assert rows[1] == "0,0,first-n,5,5,1.0"
        assert len(rows) == 1 + 2 * 2 * 2

    def test_rate_by_total_averages_antidiagonals(self, two_onb4):
        grid = run_recovery_sweep(two_onb4, (0, 1), (0, 1), trials_per_cell=5, master_seed=3)
        by_total = grid.rate_by_total("first-n")
        assert list(by_total) == [0, 1, 2]
        assert by_total[0] == 1.0 and by_total[2] == 1.0

    def test_spread_strategy_accepted(self, two_onb4):
        grid = run_recovery_sweep(
            two_onb4, (1,), (1,), trials_per_cell=3, master_seed=0, strategies=("spread",)
        )
        assert grid.strategies == ("spread",)

    def test_validation(self, two_onb4):
        with pytest.raises(ValueError, match="strategy"):
            run_recovery_sweep(two_onb4, (0,), (0,), 1, strategies=("greedy",))
        with pytest.raises(ValueError, match="non-empty"):
            run_recovery_sweep(two_onb4, (), (0,), 1)
        with pytest.raises(ValueError, match="trials_per_cell"):
            run_recovery_sweep(two_onb4, (0,), (0,), 0)
        with pytest.raises(ValueError, match="block sizes"):
            run_recovery_sweep(two_onb4, (5,), (0,), 1)

    def test_unit_law_warns(self, two_onb4):
        with pytest.warns(UserWarning, match="continuous"):
            run_recovery_sweep(
                two_onb4, (1,), (0,), trials_per_cell=2, master_seed=0,
                coeff=CoefficientSpec("unit"),
            )

    def test_summary_dict_rates(self, two_onb4):
        grid = run_recovery_sweep(two_onb4, (0,), (1,), trials_per_cell=3, master_seed=5)
        doc = grid.summary_dict()
        assert doc["rates"][0][0][0] == 1.0
        assert doc["trials_per_cell"] == 3


class TestSuccessDefinition:
    def test_threshold_constant(self):
        assert SUCCESS_REL_ERROR == 1e-4

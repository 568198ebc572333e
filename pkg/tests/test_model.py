"""Tests for the hybrid support model and coefficient sampling."""

import itertools
import math

import numpy as np
import pytest

from sparsethresh import (
    CoefficientSpec,
    HybridSupportSpec,
    PartitionedDictionary,
    choose_support_a,
    derive_rng,
    sample_instance,
    sample_support_b,
)

TOL = 1e-12


# ==============================
# spec objects
# ==============================


class TestHybridSupportSpec:
    def test_n_a_counts_indices(self):
        spec = HybridSupportSpec(support_a=(0, 3, 5), n_b=2)
        assert spec.n_a == 3
        assert spec.n_b == 2

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="duplicate"):
            HybridSupportSpec(support_a=(1, 1), n_b=0)

    def test_rejects_negative_index(self):
        with pytest.raises(ValueError, match="negative"):
            HybridSupportSpec(support_a=(-1,), n_b=0)

    def test_rejects_negative_count(self):
        with pytest.raises(ValueError):
            HybridSupportSpec(support_a=(), n_b=-2)


class TestCoefficientSpec:
    def test_rejects_unknown_law(self):
        with pytest.raises(ValueError, match="magnitude_law"):
            CoefficientSpec(magnitude_law="rademacher")

    def test_unit_law_is_constant(self):
        mags = CoefficientSpec("unit").sample_magnitudes(5, derive_rng(0))
        np.testing.assert_array_equal(mags, np.ones(5))

    def test_uniform_law_lands_in_half_open_interval(self):
        mags = CoefficientSpec("uniform").sample_magnitudes(10_000, derive_rng(1))
        assert np.all(mags > 0.0) and np.all(mags <= 1.0)
        assert abs(mags.mean() - 0.5) < 0.01

    def test_half_normal_law_has_unit_second_moment(self):
        mags = CoefficientSpec().sample_magnitudes(100_000, derive_rng(2))
        assert np.all(mags > 0.0)
        assert abs(np.mean(mags**2) - 1.0) < 0.02


# ==============================
# support sampling
# ==============================


class TestSampleSupportB:
    def test_trivial_sizes(self):
        rng = derive_rng(0)
        assert sample_support_b(5, 0, rng) == ()
        assert sample_support_b(5, 5, rng) == (0, 1, 2, 3, 4)

    def test_sorted_and_distinct(self):
        rng = derive_rng(3)
        for _ in range(200):
            sup = sample_support_b(9, 4, rng)
            assert list(sup) == sorted(set(sup))
            assert all(0 <= i < 9 for i in sup)

    def test_rejects_oversized_pick(self):
        with pytest.raises(ValueError):
            sample_support_b(3, 4, derive_rng(0))

    def test_subsets_are_uniform(self):
        # all 6 two-element subsets of {0..3} appear with frequency 1/6 +- 0.01
        rng = derive_rng(17)
        draws = 100_000
        counts = {sub: 0 for sub in itertools.combinations(range(4), 2)}
        for _ in range(draws):
            counts[sample_support_b(4, 2, rng)] += 1
        for sub, count in counts.items():
            assert abs(count / draws - 1.0 / 6.0) < 0.01, sub


class TestChooseSupportA:
    def test_first_n(self):
        assert choose_support_a("first-n", 10, 3) == (0, 1, 2)

    def test_spread(self):
        assert choose_support_a("spread", 10, 2) == (0, 5)
        assert choose_support_a("spread", 7, 3) == (0, 2, 4)
        assert choose_support_a("spread", 5, 5) == (0, 1, 2, 3, 4)

    def test_empty_pick(self):
        assert choose_support_a("first-n", 10, 0) == ()
        assert choose_support_a("spread", 10, 0) == ()

    def test_prescribed_passthrough(self):
        assert choose_support_a("prescribed", 10, 2, indices=[7, 2]) == (7, 2)

    def test_prescribed_requires_indices(self):
        with pytest.raises(ValueError, match="explicit"):
            choose_support_a("prescribed", 10, 2)

    def test_prescribed_validates(self):
        with pytest.raises(ValueError, match="duplicates"):
            choose_support_a("prescribed", 10, 2, indices=[1, 1])
        with pytest.raises(ValueError, match="out of range"):
            choose_support_a("prescribed", 10, 2, indices=[1, 10])
        with pytest.raises(ValueError, match="expected 2"):
            choose_support_a("prescribed", 10, 2, indices=[1])

    def test_random_baseline_deterministic_in_seed(self):
        first = choose_support_a("random-baseline", 20, 5, seed=7)
        second = choose_support_a("random-baseline", 20, 5, seed=7)
        assert first == second
        assert len(first) == 5

    def test_random_baseline_needs_entropy_source(self):
        with pytest.raises(ValueError, match="rng or a seed"):
            choose_support_a("random-baseline", 20, 5)

    def test_unknown_strategy(self):
        with pytest.raises(ValueError, match="unknown strategy"):
            choose_support_a("greedy", 10, 2)


# ==============================
# instance sampling
# ==============================


class TestSampleInstance:
    def test_zero_budget_gives_zero_signal(self, two_onb4):
        inst = sample_instance(two_onb4, HybridSupportSpec((), 0))
        assert inst.support == ()
        assert inst.sparsity == 0
        assert np.all(inst.x == 0) and np.all(inst.y == 0)

    def test_support_layout(self, mub7):
        spec = HybridSupportSpec(support_a=(4, 1), n_b=3, seed=5)
        inst = sample_instance(mub7, spec)
        assert inst.sparsity == 5
        assert inst.support[:2] == (1, 4)
        assert all(7 <= i < 56 for i in inst.support[2:])
        assert list(inst.support) == sorted(inst.support)

    def test_values_align_with_support(self, mub7):
        inst = sample_instance(mub7, HybridSupportSpec((0, 2), 4, seed=9))
        np.testing.assert_array_equal(inst.x[list(inst.support)], inst.values)
        assert np.count_nonzero(inst.x) == inst.sparsity
        assert np.min(np.abs(inst.values)) > 1e-12

    def test_measurement_is_consistent(self, mub7):
        inst = sample_instance(mub7, HybridSupportSpec((0, 3), 5, seed=2))
        assert np.max(np.abs(inst.y - mub7.matrix @ inst.x)) <= TOL

    def test_single_unit_atom(self):
        D = PartitionedDictionary(np.eye(4), 4)
        inst = sample_instance(D, HybridSupportSpec((2,), 0, seed=1),
                               CoefficientSpec("unit"))
        assert inst.support == (2,)
        assert abs(abs(inst.y[2]) - 1.0) <= TOL
        assert np.max(np.abs(np.delete(inst.y, 2))) == 0.0

    def test_deterministic_in_spec_seed(self, mub5):
        spec = HybridSupportSpec((1,), 3, seed=42)
        a = sample_instance(mub5, spec)
        b = sample_instance(mub5, spec)
        assert a.support == b.support
        np.testing.assert_array_equal(a.values, b.values)
        np.testing.assert_array_equal(a.y, b.y)

    def test_explicit_rng_matches_seed_derivation(self, mub5):
        spec = HybridSupportSpec((1,), 3, seed=42)
        via_seed = sample_instance(mub5, spec)
        via_rng = sample_instance(mub5, spec, rng=derive_rng(42))
        assert via_seed.support == via_rng.support
        np.testing.assert_array_equal(via_seed.values, via_rng.values)

    def test_rejects_support_outside_block_a(self, mub3):
        with pytest.raises(ValueError, match="block A"):
            sample_instance(mub3, HybridSupportSpec((3,), 0))

    def test_rejects_oversized_b_budget(self, mub3):
        with pytest.raises(ValueError, match="block B"):
            sample_instance(mub3, HybridSupportSpec((), 10))

    def test_b_column_inclusion_is_uniform(self):
        # marginal inclusion of each B column is n_b/Nb within 3 sigma
        D = PartitionedDictionary(np.eye(16), 0)
        rng = derive_rng(23)
        draws = 100_000
        hits = np.zeros(16)
        for _ in range(draws):
            support = sample_support_b(16, 4, rng)
            hits[list(support)] += 1
        p = 4.0 / 16.0
        three_sigma = 3.0 * math.sqrt(p * (1 - p) / draws)
        assert np.max(np.abs(hits / draws - p)) <= three_sigma

    def test_phases_are_uniform(self):
        # Kolmogorov-Smirnov distance of 1e5 sampled phases against U[0, 2 pi)
        D = PartitionedDictionary(np.eye(16), 0)
        rng = derive_rng(31)
        phases = []
        for _ in range(12_500):
            inst = sample_instance(D, HybridSupportSpec((), 8), rng=rng)
            phases.append(np.angle(inst.values))
        u = np.sort(np.concatenate(phases) % (2.0 * np.pi)) / (2.0 * np.pi)
        n = u.size
        assert n == 100_000
        grid = np.arange(1, n + 1) / n
        ks = max(np.max(grid - u), np.max(u - (grid - 1.0 / n)))
        assert ks < 0.01

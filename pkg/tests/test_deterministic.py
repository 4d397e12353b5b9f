import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fundalloc.deterministic import (
    Allocation,
    DetParams,
    InfeasibleBoundsError,
    allocate,
    allocation_curve,
    apply_bounds,
    gini,
    top_decile_share,
)

scores_strategy = st.lists(st.floats(0.0, 1e3, allow_nan=False), min_size=1, max_size=60)
params_strategy = st.builds(
    DetParams,
    alpha=st.floats(0, 1),
    lam=st.floats(0, 1),
    gamma=st.floats(0.05, 40),
)


class TestAllocate:
    def test_equal_scores_give_uniform_split(self):
        alloc = allocate([1, 1, 1], 1.0, DetParams(0.3, 0.7, 2.0))
        assert np.allclose(alloc.shares, 1 / 3, atol=1e-15)

    def test_pure_exploit_gamma_one_is_proportional(self):
        alloc = allocate([1, 2, 3], 1.0, DetParams(0.0, 0.0, 1.0))
        assert np.allclose(alloc.shares, [1 / 6, 2 / 6, 3 / 6], atol=1e-15)

    def test_hand_evaluated_mixture(self):
        # explore: 0.5*(1/2) each; exploit: 0.5*(0.1, 0.9) -> (0.30, 0.70)
        alloc = allocate([1, 3], 1.0, DetParams(0.5, 1.0, 2.0))
        assert np.allclose(alloc.shares, [0.30, 0.70], atol=1e-15)

    def test_all_zero_scores_fall_back_to_uniform(self):
        alloc = allocate([0, 0, 0, 0], 2.0, DetParams(0.5, 0.5, 2.0))
        assert np.allclose(alloc.shares, 0.5, atol=0)

    def test_zero_score_gets_nothing_from_exploit(self):
        alloc = allocate([0, 1], 1.0, DetParams(0.0, 0.0, 0.5))
        assert alloc.shares[0] == 0.0
        assert alloc.shares[1] == 1.0

    def test_uniform_exploration_limit(self):
        alloc = allocate([0.1, 0.5, 0.9, 0.2], 1.0, DetParams(1.0, 1.0, 3.0))
        assert np.allclose(alloc.shares, 0.25, atol=1e-15)

    def test_errors(self):
        with pytest.raises(ValueError, match="negative"):
            allocate([-1, 2], 1.0, DetParams(0.5, 0.5, 1.0))
        with pytest.raises(ValueError, match="budget"):
            allocate([1, 2], 0.0, DetParams(0.5, 0.5, 1.0))
        with pytest.raises(ValueError, match="gamma"):
            DetParams(0.5, 0.5, 0.0)
        with pytest.raises(ValueError, match="alpha"):
            DetParams(1.5, 0.5, 1.0)

    @given(scores_strategy, params_strategy, st.floats(0.01, 1e6))
    @settings(max_examples=200)
    def test_budget_conserved_and_nonnegative(self, scores, params, budget):
        alloc = allocate(scores, budget, params)
        assert abs(alloc.shares.sum() - budget) <= 1e-9 * budget
        assert np.all(alloc.shares >= 0)

    @given(scores_strategy, params_strategy)
    @settings(max_examples=100)
    def test_scale_invariance(self, scores, params):
        base = allocate(scores, 1.0, params).shares
        for c in (1e-6, 17.0, 1e6):
            scaled = allocate(np.asarray(scores) * c, 1.0, params).shares
            assert np.allclose(scaled, base, atol=1e-12)

    @given(scores_strategy, params_strategy)
    @settings(max_examples=100)
    def test_monotone_in_score(self, scores, params):
        alloc = allocate(scores, 1.0, params).shares
        s = np.asarray(scores, dtype=float)
        effective = params.alpha * (1 - params.lam) + (1 - params.alpha)
        for i in range(len(s)):
            for j in range(len(s)):
                if s[i] == s[j]:
                    assert alloc[i] == pytest.approx(alloc[j], abs=1e-12)
                elif s[i] > s[j]:
                    assert alloc[i] >= alloc[j] - 1e-12
                    if effective > 1e-9 and s.sum() > 0:
                        assert alloc[i] > alloc[j] - 1e-12

    def test_gamma_limit_concentrates_on_top(self):
        alloc = allocate([0.2, 0.5, 1.0], 1.0, DetParams(0.4, 0.5, 400.0))
        # exploit component goes entirely to the top scorer
        assert alloc.shares[2] == pytest.approx(
            0.4 * (0.5 / 3 + 0.5 * (1.0 / 1.7)) + 0.6, abs=1e-9
        )

    def test_gini_nondecreasing_in_gamma_for_pure_exploit(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            s = rng.pareto(1.5, 30) + 0.01
            ginis = [
                gini(allocate(s, 1.0, DetParams(0.0, 0.0, g)).shares)
                for g in (0.5, 1.0, 2.0, 4.0, 8.0, 16.0)
            ]
            assert all(b >= a - 1e-12 for a, b in zip(ginis, ginis[1:]))


class TestApplyBounds:
    def test_single_clamp_and_redistribute(self):
        alloc = Allocation(np.array([0.7, 0.2, 0.1]), 1.0)
        out = apply_bounds(alloc, 0.0, 0.5)
        assert np.allclose(out.shares, [0.5, 1 / 3, 1 / 6], atol=1e-12)

    def test_within_bounds_unchanged(self):
        alloc = Allocation(np.array([0.4, 0.35, 0.25]), 1.0)
        out = apply_bounds(alloc, 0.1, 0.5)
        assert np.allclose(out.shares, alloc.shares, atol=1e-12)

    def test_equal_bounds_force_uniform(self):
        alloc = Allocation(np.array([0.7, 0.2, 0.1]), 1.0)
        out = apply_bounds(alloc, 1 / 3, 1 / 3)
        assert np.allclose(out.shares, 1 / 3, atol=1e-12)

    def test_infeasible_rejected(self):
        alloc = Allocation(np.array([0.5, 0.5]), 1.0)
        with pytest.raises(InfeasibleBoundsError):
            apply_bounds(alloc, 0.6, 0.9)
        with pytest.raises(InfeasibleBoundsError):
            apply_bounds(alloc, 0.0, 0.4)

    def test_lower_bound_lifts_and_others_shrink(self):
        alloc = Allocation(np.array([0.9, 0.05, 0.05]), 1.0)
        out = apply_bounds(alloc, 0.1, 1.0)
        assert np.allclose(out.shares, [0.8, 0.1, 0.1], atol=1e-12)

    def test_two_sided_conflict(self):
        # naive simultaneous clamping of both sides would break the total
        alloc = Allocation(np.array([0.95, 0.05]), 1.0)
        out = apply_bounds(alloc, 0.3, 0.6)
        assert np.allclose(out.shares, [0.6, 0.4], atol=1e-12)

    def test_zero_shares_absorb_leftover_evenly(self):
        alloc = Allocation(np.array([1.0, 0.0, 0.0]), 1.0)
        out = apply_bounds(alloc, 0.0, 0.5)
        assert np.allclose(out.shares, [0.5, 0.25, 0.25], atol=1e-12)

    def test_preserves_order_of_interior_shares(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(2, 30))
            b = rng.dirichlet(np.ones(n) * 0.3)
            lower = float(rng.uniform(0, 0.5 / n))
            upper = float(rng.uniform(1.5 / n, 1.0))
            out = apply_bounds(Allocation(b, 1.0), lower, upper).shares
            assert abs(out.sum() - 1.0) <= 1e-9
            assert np.all(out >= lower - 1e-12) and np.all(out <= upper + 1e-12)
            interior = (out > lower + 1e-12) & (out < upper - 1e-12)
            idx = np.where(interior)[0]
            for i in idx:
                for j in idx:
                    if b[i] > b[j]:
                        assert out[i] >= out[j] - 1e-12

    def test_idempotent(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            b = rng.dirichlet(np.ones(12))
            once = apply_bounds(Allocation(b, 1.0), 0.01, 0.3)
            twice = apply_bounds(once, 0.01, 0.3)
            assert np.allclose(once.shares, twice.shares, atol=1e-12)

    def test_allocate_applies_params_bounds(self):
        params = DetParams(0.0, 0.0, 8.0, lower_bound=0.05, upper_bound=0.5)
        alloc = allocate([0.1, 0.2, 0.9, 1.0], 1.0, params)
        assert np.all(alloc.shares >= 0.05 - 1e-12)
        assert np.all(alloc.shares <= 0.5 + 1e-12)
        assert abs(alloc.shares.sum() - 1.0) <= 1e-9


class TestAllocationCurve:
    def test_linear_for_proportional_rule(self):
        curve = allocation_curve(DetParams(0.0, 0.0, 1.0), 11)
        s, shares = curve[:, 0], curve[:, 1]
        total = s.sum()
        assert np.allclose(shares, s / total, atol=1e-12)

    def test_top_point_dominates_for_large_gamma(self):
        curve = allocation_curve(DetParams(0.0, 0.0, 500.0), 21)
        assert curve[-1, 1] > 0.999

    def test_flat_for_uniform_exploration(self):
        curve = allocation_curve(DetParams(1.0, 1.0, 2.0), 7)
        assert np.allclose(curve[:, 1], 1 / 7, atol=1e-15)

    def test_grid_points_validated(self):
        with pytest.raises(ValueError):
            allocation_curve(DetParams(0.5, 0.5, 1.0), 1)


class TestConcentrationDiagnostics:
    def test_gini_zero_for_uniform(self):
        assert gini([0.25] * 4) == pytest.approx(0.0, abs=1e-12)

    def test_gini_extreme_for_point_mass(self):
        assert gini([1.0, 0, 0, 0]) == pytest.approx(0.75)

    def test_top_decile_share(self):
        shares = np.array([0.91] + [0.01] * 9)
        assert top_decile_share(shares) == pytest.approx(0.91)

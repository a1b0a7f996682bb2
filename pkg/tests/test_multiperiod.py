import numpy as np
import pytest

from hrfrontier import (
    AssetUniverse,
    InvalidHorizonError,
    NotScenarioBackedError,
    ScenarioPayoff,
    TreeTooLargeError,
    frontier_coefficients,
    gram_from_scenarios,
    multiperiod_frontier,
    product_tree,
    propagate,
    scenario_universe,
    special_portfolios,
    tree_oracle,
)
from conftest import BENCHMARK_MU, BENCHMARK_SIGMA, random_scenario_market

# Exact-rational four-period statistics of the benchmark market.
BENCH4_HR_SQ_X = 0.8154962271794837
BENCH4_MU_Y = 0.30380986034320073
BENCH4_OMEGA_SQ_Y = 0.5757088427422385
BENCH4_MU_Z = 1.646632237914963
BENCH4_SIGMA_SQ_Z = 0.07544573250468156
BENCH4_SR_INV_SQ = 0.22624724268639523


def lifted_benchmark():
    return scenario_universe(
        AssetUniverse(np.array(BENCHMARK_MU), np.array(BENCHMARK_SIGMA))
    )


def two_state_market():
    probs = (0.55, 0.45)
    up = ScenarioPayoff.from_arrays(probs, (1.3, 0.9))
    flat = ScenarioPayoff.from_arrays(probs, (1.05, 1.05))
    return gram_from_scenarios([up, flat], [1.0, 1.0])


class TestPropagate:
    def test_benchmark_four_periods(self, benchmark_market):
        sp = special_portfolios(benchmark_market)
        stats4 = propagate(sp, 4)
        assert stats4.hr_sq_x == pytest.approx(BENCH4_HR_SQ_X, rel=1e-12)
        assert stats4.mu_y == pytest.approx(BENCH4_MU_Y, rel=1e-12)
        assert stats4.omega_sq_y == pytest.approx(BENCH4_OMEGA_SQ_Y, rel=1e-12)

    def test_one_period_is_the_identity(self, benchmark_market):
        sp = special_portfolios(benchmark_market)
        stats1 = propagate(sp, 1)
        assert stats1.mu_y == sp.mu_y
        assert stats1.omega_sq_y == sp.omega_sq_y
        assert stats1.hr_sq_y == sp.hr_sq_y
        assert stats1.hr_sq_x == sp.hr_sq_x

    def test_riskless_ratio_geometric_sum_switches_to_horizon(self):
        market = gram_from_scenarios([ScenarioPayoff(((1.0, 1.0),))], [1.0])
        sp = special_portfolios(market)
        stats3 = propagate(sp, 3)
        assert stats3.hr_sq_y == 1.0
        assert stats3.hr_sq_x == 0.0

    def test_ratio_budget_grows_with_horizon(self, benchmark_market):
        sp = special_portfolios(benchmark_market)
        values = [propagate(sp, n).hr_sq_x for n in range(1, 9)]
        assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))

    def test_bound_holds_at_every_horizon(self):
        rng = np.random.default_rng(81)
        for _ in range(30):
            market = random_scenario_market(rng, 4, 2)
            sp = special_portfolios(market)
            for n in range(1, 7):
                stats_n = propagate(sp, n)
                assert stats_n.hr_sq_x + stats_n.hr_sq_y <= 1.0 + 1e-10

    @pytest.mark.parametrize("bad", [0, -1, 2.5])
    def test_invalid_horizon(self, benchmark_market, bad):
        sp = special_portfolios(benchmark_market)
        with pytest.raises(InvalidHorizonError):
            propagate(sp, bad)


class TestTreeOracle:
    def test_one_period_equals_the_solver(self):
        market = two_state_market()
        sp = special_portfolios(market)
        oracle = tree_oracle(market, 1)
        assert oracle.mu_y == pytest.approx(sp.mu_y, rel=1e-12)
        assert oracle.omega_sq_y == pytest.approx(sp.omega_sq_y, rel=1e-12)
        assert oracle.hr_sq_x == pytest.approx(sp.hr_sq_x, rel=1e-10, abs=1e-14)

    def test_two_state_two_periods_leafwise(self):
        market = two_state_market()
        sp = special_portfolios(market)
        tree = product_tree(market, 2)
        assert tree.n_leaves == 4
        assert tree.leaf_probabilities.sum() == pytest.approx(1.0, abs=1e-12)
        q = market.state_probabilities
        expected_probs = np.array([q[a] * q[b] for a in range(2) for b in range(2)])
        assert np.abs(tree.leaf_probabilities - expected_probs).max() < 1e-15
        y_one = market.scenario_values @ sp.w_y
        expected = np.array([y_one[a] * y_one[b] for a in range(2) for b in range(2)])
        assert np.abs(tree.y_leaves - expected).max() < 1e-14
        oracle = tree_oracle(market, 2)
        assert oracle.mu_y == pytest.approx(sp.mu_y**2, rel=1e-12)
        assert oracle.omega_sq_y == pytest.approx(sp.omega_sq_y**2, rel=1e-12)

    def test_propagate_matches_oracle_on_two_state_market(self):
        market = two_state_market()
        sp = special_portfolios(market)
        for n in (1, 2, 3):
            closed = propagate(sp, n)
            oracle = tree_oracle(market, n)
            assert oracle.mu_y == pytest.approx(closed.mu_y, abs=1e-10)
            assert oracle.omega_sq_y == pytest.approx(closed.omega_sq_y, abs=1e-10)
            assert oracle.hr_sq_y == pytest.approx(closed.hr_sq_y, abs=1e-10)
            assert oracle.hr_sq_x == pytest.approx(closed.hr_sq_x, abs=1e-10)

    def test_propagate_matches_oracle_on_lifted_benchmark(self):
        market = lifted_benchmark()
        sp = special_portfolios(market)
        closed = propagate(sp, 2)
        oracle = tree_oracle(market, 2)
        assert oracle.hr_sq_x == pytest.approx(closed.hr_sq_x, abs=1e-10)
        assert oracle.mu_y == pytest.approx(closed.mu_y, abs=1e-10)

    def test_mix_leaves_are_the_stable_combination(self):
        market = two_state_market()
        sp = special_portfolios(market)
        tree = product_tree(market, 3)
        a_n = (sp.mu_y / sp.omega_sq_y) ** 3
        assert np.abs(tree.mix_leaves - (tree.x_leaves + a_n * tree.y_leaves)).max() < 1e-12

    def test_tree_too_large(self):
        rng = np.random.default_rng(82)
        market = random_scenario_market(rng, 10, 2)
        with pytest.raises(TreeTooLargeError):
            product_tree(market, 6)

    def test_requires_scenarios(self, benchmark_market):
        with pytest.raises(NotScenarioBackedError):
            tree_oracle(benchmark_market, 2)

    def test_invalid_horizon(self):
        with pytest.raises(InvalidHorizonError):
            product_tree(two_state_market(), 0)


class TestMultiperiodFrontier:
    def test_benchmark_four_period_parabolas(self, benchmark_market):
        sp = special_portfolios(benchmark_market)
        coeffs = multiperiod_frontier(propagate(sp, 4))
        assert coeffs.mu_omega.level == pytest.approx(BENCH4_OMEGA_SQ_Y, rel=1e-12)
        assert coeffs.mu_omega.curvature == pytest.approx(
            1.0 / BENCH4_HR_SQ_X, rel=1e-12
        )
        assert coeffs.mu_omega.center == pytest.approx(BENCH4_MU_Y, rel=1e-12)
        assert coeffs.mu_sigma.level == pytest.approx(BENCH4_SIGMA_SQ_Z, rel=1e-11)
        assert coeffs.mu_sigma.curvature == pytest.approx(BENCH4_SR_INV_SQ, rel=1e-11)
        assert coeffs.mu_sigma.center == pytest.approx(BENCH4_MU_Z, rel=1e-12)

    def test_one_period_reduces_to_the_frontier_module(self, benchmark_market):
        sp = special_portfolios(benchmark_market)
        direct = frontier_coefficients(sp)
        via_propagation = multiperiod_frontier(propagate(sp, 1))
        assert via_propagation.mu_omega == direct.mu_omega
        assert via_propagation.mu_sigma == direct.mu_sigma

    def test_vertex_dominates_sampled_dynamic_strategies(self):
        rng = np.random.default_rng(83)
        market = random_scenario_market(rng, 3, 2)
        sp = special_portfolios(market)
        horizon = 3
        coeffs = multiperiod_frontier(propagate(sp, horizon))
        q = market.state_probabilities
        values = market.scenario_values
        leaf_states = [
            (a, b, c) for a in range(3) for b in range(3) for c in range(3)
        ]
        for _ in range(200):
            # Deterministic per-period rebalanced unit-cost strategy.
            weights = rng.uniform(-1.0, 2.0, (horizon, 2))
            weights /= (weights @ market.prices)[:, None]
            returns = values @ weights.T  # state x period
            leaf_payoff = np.array(
                [np.prod([returns[s, t] for t, s in enumerate(path)]) for path in leaf_states]
            )
            leaf_prob = np.array([q[a] * q[b] * q[c] for a, b, c in leaf_states])
            mean = float(leaf_prob @ leaf_payoff)
            variance = float(leaf_prob @ (leaf_payoff - mean) ** 2)
            assert variance >= coeffs.mu_sigma(mean) - 1e-9

"""Shared generators for randomized market and payoff tests."""

from __future__ import annotations

import math

import numpy as np
import pytest

from hrfrontier import (
    AssetUniverse,
    GramMarket,
    ScenarioPayoff,
    gram_from_scenarios,
    gram_from_universe,
)

BENCHMARK_MU = [1.162, 1.246, 1.228]
BENCHMARK_SIGMA = [
    [0.0146, 0.0187, 0.0145],
    [0.0187, 0.0854, 0.0104],
    [0.0145, 0.0104, 0.0289],
]


@pytest.fixture
def benchmark_market() -> GramMarket:
    universe = AssetUniverse(
        mean_returns=np.array(BENCHMARK_MU), covariance=np.array(BENCHMARK_SIGMA)
    )
    return gram_from_universe(universe)


def random_universe(rng: np.random.Generator, n: int) -> AssetUniverse:
    """Random SPD covariance plus random means; never admits arbitrage."""
    factor = rng.standard_normal((n, n + 2))
    cov = factor @ factor.T / (n + 2) + 0.05 * np.eye(n)
    mu = rng.uniform(0.5, 1.5, n)
    return AssetUniverse(mean_returns=mu, covariance=cov)


def random_market(rng: np.random.Generator, n: int) -> GramMarket:
    return gram_from_universe(random_universe(rng, n))


def random_probs(rng: np.random.Generator, n_states: int) -> np.ndarray:
    raw = rng.uniform(0.2, 1.0, n_states)
    probs = raw / raw.sum()
    probs[-1] = 1.0 - math.fsum(probs[:-1])
    return probs


def random_scenario_market(
    rng: np.random.Generator, n_states: int, n_assets: int
) -> GramMarket:
    """Scenario market priced by a strictly positive kernel (no arbitrage)."""
    assert n_assets <= n_states
    for _ in range(50):
        probs = random_probs(rng, n_states)
        values = rng.uniform(-0.5, 2.0, (n_states, n_assets))
        kernel = rng.uniform(0.3, 1.7, n_states)
        prices = (probs * kernel) @ values
        if np.abs(prices).max() < 1e-3:
            continue
        basis = [
            ScenarioPayoff.from_arrays(probs, values[:, i]) for i in range(n_assets)
        ]
        try:
            return gram_from_scenarios(basis, prices)
        except Exception:
            continue
    raise RuntimeError("failed to generate a scenario market")


def random_payoff(
    rng: np.random.Generator,
    max_states: int = 12,
    *,
    positive_mean: bool = False,
    with_downside: bool = False,
) -> ScenarioPayoff:
    for _ in range(200):
        n = int(rng.integers(2, max_states + 1))
        probs = random_probs(rng, n)
        values = rng.uniform(-1.0, 1.5, n)
        mean = float(probs @ values)
        if positive_mean and mean <= 1e-3:
            continue
        if with_downside and values.min() >= -1e-3:
            continue
        return ScenarioPayoff.from_arrays(probs, values)
    raise RuntimeError("failed to generate a payoff")

"""Mean-variance frontier toolkit built on mean/L2-norm performance ratios.

Covers the special portfolios that span the efficient frontier, both frontier
parameterizations, pricing-kernel bounds (plain and positivity-constrained),
exact monotone ratios of discrete payoffs, and closed-form multiperiod
propagation under IID returns with a scenario-tree oracle.
"""

from .errors import (
    ArbitrageError,
    DegenerateFrontierError,
    DegeneratePricesError,
    HRFrontierError,
    InternalInvariantError,
    InvalidBetaError,
    InvalidHorizonError,
    InvalidInputError,
    NegativeKernelError,
    NoDownsideError,
    NonPositiveMeanError,
    NotAKernelError,
    NotPositiveDefiniteError,
    NotScenarioBackedError,
    OutOfRangeError,
    StateSpaceMismatchError,
    TreeTooLargeError,
    ZeroPayoffError,
)
from .frontier import (
    FrontierCoefficients,
    FrontierPoint,
    HansenBoundReport,
    Parabola,
    SpecialPortfolios,
    XPortfolio,
    YPortfolio,
    ZPortfolio,
    check_hansen_bound,
    frontier_coefficients,
    frontier_points,
    solve_x,
    solve_y,
    solve_z,
    special_portfolios,
)
from .kernel import (
    HJBoundReport,
    KernelCheck,
    KernelFrontier,
    check_kernel,
    hj_bounds,
    kernel_frontier,
)
from .market import (
    AssetUniverse,
    DatedFlows,
    GramMarket,
    SequenceSpaceSpec,
    gram_from_scenarios,
    gram_from_sequence_space,
    gram_from_universe,
    market_from_json,
    scenario_universe,
    validate_market,
)
from .moments import (
    RatioStats,
    ScaledUtility,
    ScenarioPayoff,
    hr_to_sr,
    optimal_scaled_utility,
    quadratic_utility,
    sr_to_hr,
    stats,
)
from .monotone import (
    MonotoneBoundReport,
    MonotoneResult,
    monotone_hansen_ratio,
    monotone_hj_bound,
    monotone_sharpe_ratio,
    monotonized_utility,
)
from .multiperiod import (
    MultiperiodStats,
    ScenarioTree,
    multiperiod_frontier,
    product_tree,
    propagate,
    tree_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "ArbitrageError",
    "AssetUniverse",
    "DatedFlows",
    "DegenerateFrontierError",
    "DegeneratePricesError",
    "FrontierCoefficients",
    "FrontierPoint",
    "GramMarket",
    "HJBoundReport",
    "HRFrontierError",
    "HansenBoundReport",
    "InternalInvariantError",
    "InvalidBetaError",
    "InvalidHorizonError",
    "InvalidInputError",
    "KernelCheck",
    "KernelFrontier",
    "MonotoneBoundReport",
    "MonotoneResult",
    "MultiperiodStats",
    "NegativeKernelError",
    "NoDownsideError",
    "NonPositiveMeanError",
    "NotAKernelError",
    "NotPositiveDefiniteError",
    "NotScenarioBackedError",
    "OutOfRangeError",
    "Parabola",
    "RatioStats",
    "ScaledUtility",
    "ScenarioPayoff",
    "ScenarioTree",
    "SequenceSpaceSpec",
    "SpecialPortfolios",
    "StateSpaceMismatchError",
    "TreeTooLargeError",
    "XPortfolio",
    "YPortfolio",
    "ZPortfolio",
    "ZeroPayoffError",
    "check_hansen_bound",
    "check_kernel",
    "frontier_coefficients",
    "frontier_points",
    "gram_from_scenarios",
    "gram_from_sequence_space",
    "gram_from_universe",
    "hj_bounds",
    "hr_to_sr",
    "kernel_frontier",
    "market_from_json",
    "monotone_hansen_ratio",
    "monotone_hj_bound",
    "monotone_sharpe_ratio",
    "monotonized_utility",
    "multiperiod_frontier",
    "optimal_scaled_utility",
    "product_tree",
    "propagate",
    "quadratic_utility",
    "scenario_universe",
    "solve_x",
    "solve_y",
    "solve_z",
    "special_portfolios",
    "sr_to_hr",
    "stats",
    "tree_oracle",
    "validate_market",
]

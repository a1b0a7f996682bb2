"""Special portfolios and the efficient frontier of a market.

Three portfolios pin down the whole frontier:

* ``y``: the unique unit-cost portfolio orthogonal to every zero-cost
  position; it has the smallest second moment among unit-cost portfolios and
  its scaled payoff prices the market.
* ``x``: the zero-cost portfolio with the highest expected quadratic
  utility; equivalently the projection of the bliss payoff 1 onto the
  zero-cost subspace.  Its mean, second moment, and squared mean/L2 ratio
  coincide.
* ``z``: the minimum-variance unit-cost portfolio, ``y + mu_z * x``.

Every efficient unit-cost portfolio is ``y + lambda * x``, which gives the
frontier as a parabola in both (mean, L2-norm) and (mean, std) coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from ._linalg import spd_factor, spd_solve
from .errors import (
    ArbitrageError,
    DegenerateFrontierError,
    InternalInvariantError,
)
from .market import ARBITRAGE_TOL, GramMarket

#: Below this squared ratio the zero-cost side is treated as empty of
#: opportunities and the frontier degenerates to a point per cost level.
DEGENERATE_X_TOL = 1e-14
#: Floating-point dust allowed when clamping the minimum variance to zero.
VARIANCE_CLAMP_TOL = 1e-12
#: The frontier ratio bound is attained only when the mean of y is nonzero.
MEAN_Y_ZERO_TOL = 1e-12


class YPortfolio(NamedTuple):
    weights: np.ndarray
    mean: float
    second_moment: float


class XPortfolio(NamedTuple):
    weights: np.ndarray
    hr_sq: float


class ZPortfolio(NamedTuple):
    weights: np.ndarray
    mean: float
    variance: float


@dataclass(frozen=True)
class SpecialPortfolios:
    """Weights and summary statistics of the portfolios y, x, and z."""

    w_y: np.ndarray
    w_x: np.ndarray
    w_z: np.ndarray
    mu_y: float
    omega_sq_y: float
    hr_sq_y: float
    hr_sq_x: float
    mu_z: float
    sigma_sq_z: float
    lambda_hat: float
    max_hr_attained: bool

    def to_dict(self) -> dict:
        return {
            "w_y": [float(w) for w in self.w_y],
            "w_x": [float(w) for w in self.w_x],
            "w_z": [float(w) for w in self.w_z],
            "mu_y": self.mu_y,
            "omega_sq_y": self.omega_sq_y,
            "hr_sq_y": self.hr_sq_y,
            "hr_sq_x": self.hr_sq_x,
            "mu_z": self.mu_z,
            "sigma_sq_z": self.sigma_sq_z,
            "lambda_hat": self.lambda_hat,
            "max_hr_attained": self.max_hr_attained,
        }


class Parabola(NamedTuple):
    """``value(mu) = level + curvature * (mu - center)**2``."""

    level: float
    curvature: float
    center: float

    def __call__(self, mu: float) -> float:
        return self.level + self.curvature * (mu - self.center) ** 2


@dataclass(frozen=True)
class FrontierCoefficients:
    """Frontier parabolas in (mean, second-moment) and (mean, variance) form.

    ``degenerate`` markets (no zero-cost opportunity) have no parabolas: the
    frontier is the single portfolio y per cost level.
    """

    mu_omega: Parabola | None
    mu_sigma: Parabola | None
    degenerate: bool = False

    def to_dict(self) -> dict:
        if self.degenerate:
            return {"degenerate": True, "mu_omega": None, "mu_sigma": None}
        assert self.mu_omega is not None and self.mu_sigma is not None
        return {
            "degenerate": False,
            "mu_omega": {
                "level": self.mu_omega.level,
                "curvature": self.mu_omega.curvature,
                "center": self.mu_omega.center,
            },
            "mu_sigma": {
                "level": self.mu_sigma.level,
                "curvature": self.mu_sigma.curvature,
                "center": self.mu_sigma.center,
            },
        }


class FrontierPoint(NamedTuple):
    mu: float
    omega: float
    sigma: float


@dataclass(frozen=True)
class HansenBoundReport:
    """Sum of the squared ratios of x and y against the hard bound of one."""

    hr_sq_x: float
    hr_sq_y: float
    total: float
    slack: float
    passed: bool


def solve_y(market: GramMarket) -> YPortfolio:
    """Minimum-second-moment unit-cost portfolio."""
    lower = spd_factor(market.gram)
    gi_p = spd_solve(lower, market.prices)
    p_gi_p = float(market.prices @ gi_p)
    weights = gi_p / p_gi_p
    return YPortfolio(
        weights=weights,
        mean=float(market.means @ weights),
        second_moment=1.0 / p_gi_p,
    )


def solve_x(market: GramMarket) -> XPortfolio:
    """Utility-optimal zero-cost portfolio and its squared ratio."""
    lower = spd_factor(market.gram)
    return _solve_x_factored(market, lower)


def _solve_x_factored(market: GramMarket, lower: np.ndarray) -> XPortfolio:
    gi_p = spd_solve(lower, market.prices)
    gi_m = spd_solve(lower, market.means)
    lam = float(market.prices @ gi_m) / float(market.prices @ gi_p)
    weights = gi_m - lam * gi_p
    hr_sq = float(market.means @ weights)
    if hr_sq < 0.0:
        if hr_sq < -VARIANCE_CLAMP_TOL:
            raise InternalInvariantError(
                "squared ratio of the zero-cost optimum came out negative",
                hr_sq_x=hr_sq,
            )
        hr_sq = 0.0
    if hr_sq >= 1.0 - ARBITRAGE_TOL:
        raise ArbitrageError(
            "zero-cost opportunity with (numerically) riskless payoff",
            hr_sq_x=hr_sq,
        )
    return XPortfolio(weights=weights, hr_sq=hr_sq)


def _z_stats(
    mu_y: float, omega_sq_y: float, hr_sq_y: float, hr_sq_x: float
) -> tuple[float, float]:
    """Mean and variance of the minimum-variance unit-cost portfolio."""
    if hr_sq_x >= 1.0 - ARBITRAGE_TOL:
        raise ArbitrageError(
            "zero-cost squared ratio too close to one", hr_sq_x=hr_sq_x
        )
    mu_z = mu_y / (1.0 - hr_sq_x)
    sigma_sq_z = omega_sq_y * (1.0 - hr_sq_y / (1.0 - hr_sq_x))
    if sigma_sq_z < 0.0:
        if sigma_sq_z < -VARIANCE_CLAMP_TOL:
            raise InternalInvariantError(
                "minimum variance came out negative", sigma_sq_z=sigma_sq_z
            )
        sigma_sq_z = 0.0
    return mu_z, sigma_sq_z


def solve_z(market: GramMarket) -> ZPortfolio:
    """Minimum-variance unit-cost portfolio, built from y and x."""
    sp = special_portfolios(market)
    return ZPortfolio(weights=sp.w_z, mean=sp.mu_z, variance=sp.sigma_sq_z)


def special_portfolios(market: GramMarket) -> SpecialPortfolios:
    """Solve all three special portfolios off one factorization."""
    lower = spd_factor(market.gram)
    gi_p = spd_solve(lower, market.prices)
    p_gi_p = float(market.prices @ gi_p)
    w_y = gi_p / p_gi_p
    omega_sq_y = 1.0 / p_gi_p
    mu_y = float(market.means @ w_y)
    hr_sq_y = mu_y * mu_y / omega_sq_y
    x = _solve_x_factored(market, lower)
    mu_z, sigma_sq_z = _z_stats(mu_y, omega_sq_y, hr_sq_y, x.hr_sq)
    w_z = w_y + mu_z * x.weights
    scale = max(1.0, float(np.linalg.norm(market.means) * np.linalg.norm(w_y)))
    return SpecialPortfolios(
        w_y=w_y,
        w_x=x.weights,
        w_z=w_z,
        mu_y=mu_y,
        omega_sq_y=omega_sq_y,
        hr_sq_y=hr_sq_y,
        hr_sq_x=x.hr_sq,
        mu_z=mu_z,
        sigma_sq_z=sigma_sq_z,
        lambda_hat=mu_z,
        max_hr_attained=abs(mu_y) > MEAN_Y_ZERO_TOL * scale,
    )


def _parabolas(
    mu_y: float,
    omega_sq_y: float,
    hr_sq_y: float,
    hr_sq_x: float,
    mu_z: float,
    sigma_sq_z: float,
) -> FrontierCoefficients:
    if hr_sq_x <= DEGENERATE_X_TOL:
        return FrontierCoefficients(mu_omega=None, mu_sigma=None, degenerate=True)
    mu_omega = Parabola(level=omega_sq_y, curvature=1.0 / hr_sq_x, center=mu_y)
    mu_sigma = Parabola(
        level=sigma_sq_z, curvature=1.0 / hr_sq_x - 1.0, center=mu_z
    )
    if mu_omega.level < 0.0 or mu_sigma.level < 0.0 or mu_sigma.curvature <= 0.0:
        raise InternalInvariantError(
            "frontier parabola coefficients out of range",
            omega_level=mu_omega.level,
            sigma_level=mu_sigma.level,
            sigma_curvature=mu_sigma.curvature,
        )
    return FrontierCoefficients(mu_omega=mu_omega, mu_sigma=mu_sigma)


def frontier_coefficients(sp: SpecialPortfolios) -> FrontierCoefficients:
    """Both frontier parabolas; degenerate flag when x is the null portfolio."""
    return _parabolas(
        sp.mu_y, sp.omega_sq_y, sp.hr_sq_y, sp.hr_sq_x, sp.mu_z, sp.sigma_sq_z
    )


def frontier_points(
    coefficients: FrontierCoefficients, mu_grid: Sequence[float]
) -> list[FrontierPoint]:
    """Evaluate both parabolas on a grid of means.

    The pointwise identity ``omega**2 - mu**2 = sigma**2`` is re-checked to
    1e-10; a violation means the coefficients are inconsistent.
    """
    if coefficients.degenerate or coefficients.mu_omega is None:
        raise DegenerateFrontierError(
            "degenerate frontier has no parabola to evaluate"
        )
    assert coefficients.mu_sigma is not None
    points = []
    for mu in mu_grid:
        mu = float(mu)
        omega_sq = coefficients.mu_omega(mu)
        sigma_sq = coefficients.mu_sigma(mu)
        if abs(omega_sq - mu * mu - sigma_sq) > 1e-10 * max(1.0, abs(omega_sq)):
            raise InternalInvariantError(
                "frontier parabolas violate omega^2 - mu^2 = sigma^2",
                mu=mu,
                omega_sq=omega_sq,
                sigma_sq=sigma_sq,
            )
        points.append(
            FrontierPoint(mu=mu, omega=math.sqrt(omega_sq), sigma=math.sqrt(sigma_sq))
        )
    return points


def check_hansen_bound(sp: SpecialPortfolios) -> HansenBoundReport:
    """Check ``hr_sq_x + hr_sq_y <= 1``; the slack is the squared ratio left
    to payoffs outside the market."""
    total = sp.hr_sq_x + sp.hr_sq_y
    return HansenBoundReport(
        hr_sq_x=sp.hr_sq_x,
        hr_sq_y=sp.hr_sq_y,
        total=total,
        slack=1.0 - total,
        passed=total <= 1.0 + 1e-10,
    )

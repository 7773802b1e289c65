"""Core value types shared by all pricing modules.

Models, market data, observation schedules and numerical grids are immutable
dataclasses validated at construction, so they can be shared freely between
workers and cached by the service layer.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .errors import BadConfig, BadGrid, NonPositiveSigma, VGInadmissible


@dataclass(frozen=True)
class BlackScholes:
    """Lognormal dynamics with annualized volatility ``sigma``."""

    sigma: float

    kind = "bs"

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise NonPositiveSigma(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class VarianceGamma:
    """Exponential variance-gamma dynamics.

    Attributes:
        sigma: volatility of the time-changed Brownian motion
        nu: variance rate of the gamma clock
        theta: drift of the time-changed Brownian motion
    """

    sigma: float
    nu: float
    theta: float

    kind = "vg"

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise NonPositiveSigma(f"sigma must be positive, got {self.sigma}")
        if not self.nu > 0:
            raise VGInadmissible(f"nu must be positive, got {self.nu}")
        if not self.martingale_base > 0:
            raise VGInadmissible(
                "1 - theta*nu - sigma^2*nu/2 must be positive, got "
                f"{self.martingale_base:.6g}"
            )

    @property
    def martingale_base(self) -> float:
        """Argument of the log in the drift correction; must stay positive."""
        return 1.0 - self.theta * self.nu - 0.5 * self.sigma**2 * self.nu


ModelParams = Union[BlackScholes, VarianceGamma]


@dataclass(frozen=True)
class Market:
    """Current spot and continuously compounded flat rate."""

    spot: float
    rate: float

    def __post_init__(self) -> None:
        if not self.spot > 0:
            raise BadConfig(f"spot must be positive, got {self.spot}")


@dataclass(frozen=True)
class Schedule:
    """Equally spaced observation times: n_obs periods of tau years each."""

    n_obs: int
    tau: float
    days_per_year: int = 365

    def __post_init__(self) -> None:
        if self.n_obs < 1:
            raise BadConfig(f"n_obs must be >= 1, got {self.n_obs}")
        if not self.tau > 0:
            raise BadConfig(f"tau must be positive, got {self.tau}")
        if self.days_per_year < 1:
            raise BadConfig("days_per_year must be a positive integer")

    @classmethod
    def from_days(cls, n_obs: int, period_days: float, days_per_year: int = 365) -> "Schedule":
        return cls(n_obs=n_obs, tau=period_days / days_per_year, days_per_year=days_per_year)

    @property
    def maturity(self) -> float:
        return self.n_obs * self.tau


@dataclass(frozen=True)
class GridSpec:
    """Sampling grid for normalized curves (w) and the strike integral (k).

    Both ranges are snapped so that the step divides them into an even number
    of subintervals, as composite Simpson integration requires.
    """

    w_min: float
    w_max: float
    w_step: float
    k_min: float
    k_max: float
    k_step: float

    def __post_init__(self) -> None:
        if not (0 < self.w_min < self.w_max):
            raise BadGrid(f"need 0 < w_min < w_max, got [{self.w_min}, {self.w_max}]")
        if not (0 < self.k_min < self.k_max):
            raise BadGrid(f"need 0 < k_min < k_max, got [{self.k_min}, {self.k_max}]")
        if not (self.w_step > 0 and self.k_step > 0):
            raise BadGrid("grid steps must be positive")
        if self.w_step >= self.w_max - self.w_min or self.k_step >= self.k_max - self.k_min:
            raise BadGrid("grid step larger than the grid range")

    @classmethod
    def default_bs(cls) -> "GridSpec":
        return cls(w_min=0.0025, w_max=2.0, w_step=0.0025,
                   k_min=0.01, k_max=2.0, k_step=0.001)

    @classmethod
    def default_vg(cls) -> "GridSpec":
        return cls(w_min=0.005, w_max=2.0, w_step=0.005,
                   k_min=0.1, k_max=2.0, k_step=0.001)

    @classmethod
    def default_for(cls, model: ModelParams) -> "GridSpec":
        return cls.default_bs() if model.kind == "bs" else cls.default_vg()

    def snapped(self) -> "GridSpec":
        """Extend each upper bound by at most one step to make the
        subinterval counts even.  Idempotent."""
        new_w_max = self.w_max
        if _n_subintervals(self.w_min, self.w_max, self.w_step) % 2:
            new_w_max = self.w_max + self.w_step
        new_k_max = self.k_max
        if _n_subintervals(self.k_min, self.k_max, self.k_step) % 2:
            new_k_max = self.k_max + self.k_step
        if new_w_max == self.w_max and new_k_max == self.k_max:
            return self
        return replace(self, w_max=new_w_max, k_max=new_k_max)

    def w_grid(self) -> np.ndarray:
        n = _n_subintervals(self.w_min, self.w_max, self.w_step)
        return self.w_min + self.w_step * np.arange(n + 1)

    def k_grid(self) -> np.ndarray:
        n = _n_subintervals(self.k_min, self.k_max, self.k_step)
        return self.k_min + self.k_step * np.arange(n + 1)

    def refined(self, factor: int = 2) -> "GridSpec":
        """Grid with both steps divided by ``factor`` (for convergence runs)."""
        return replace(self, w_step=self.w_step / factor, k_step=self.k_step / factor)


def _n_subintervals(lo: float, hi: float, step: float) -> int:
    return int(round((hi - lo) / step))


@dataclass
class NormalizedCurve:
    """Unit-spot Asian call prices for ``ell`` remaining observations.

    ``values[i]`` is the price at strike ``w_grid[i]``; ``second_derivs`` holds
    the discrete strike-convexity used by the next recursion step.
    """

    ell: int
    w_grid: np.ndarray
    values: np.ndarray
    second_derivs: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.ell < 1:
            raise BadConfig(f"ell must be >= 1, got {self.ell}")
        if len(self.w_grid) != len(self.values):
            raise BadGrid("w_grid and values must have equal length")


@dataclass
class PhiCurve:
    """Out-of-the-money European prices phi(1, K) over the integration grid."""

    k_grid: np.ndarray
    phi_values: np.ndarray

    def __post_init__(self) -> None:
        if len(self.k_grid) != len(self.phi_values):
            raise BadGrid("k_grid and phi_values must have equal length")


@dataclass(frozen=True)
class MCResult:
    """Monte Carlo estimate with its standard error."""

    estimate: float
    std_error: float
    n_paths: int
    seed: int


@dataclass(frozen=True)
class ValidatedConfig:
    model: ModelParams
    market: Market
    schedule: Schedule
    grid: GridSpec


def validate(model: ModelParams, market: Market, schedule: Schedule,
             grid: GridSpec | None = None) -> ValidatedConfig:
    """Normalize a pricing configuration or raise a structured error.

    Grids are snapped to even subinterval counts; all other types validate at
    construction, so re-validating an already validated config is a no-op.
    """
    if grid is None:
        grid = GridSpec.default_for(model)
    return ValidatedConfig(model=model, market=market, schedule=schedule,
                           grid=grid.snapped())


def forward_average_factor(ell: int, rate: float, tau: float) -> float:
    """Discounted average of the period forwards: e^{-r l tau} * (1/l) sum_i e^{r i tau}."""
    periods = np.arange(1, ell + 1)
    return float(np.exp(-rate * ell * tau) * np.exp(rate * tau * periods).sum() / ell)


def curve_diagnostics(curve: NormalizedCurve, rate: float, tau: float) -> dict:
    """Worst-case invariant metrics of a curve, for tests and monitoring.

    Returns max increase between neighbours (monotonicity), the most negative
    undivided second difference (convexity), the minimum value, and the
    largest violations of the forward-average upper/lower no-arbitrage bounds.
    """
    vals = curve.values
    w = curve.w_grid
    upper = forward_average_factor(curve.ell, rate, tau)
    lower = np.maximum(upper - np.exp(-rate * curve.ell * tau) * w, 0.0)
    return {
        "max_increase": float(np.diff(vals).max()),
        "min_second_difference": float((vals[:-2] - 2 * vals[1:-1] + vals[2:]).min()),
        "min_value": float(vals.min()),
        "upper_bound_violation": float((vals - upper).max()),
        "lower_bound_violation": float((lower - vals).max()),
    }

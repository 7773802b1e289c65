"""Pydantic request/response models for the pricing service."""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..domain import BlackScholes, GridSpec, Market, ModelParams, Schedule, VarianceGamma
from ..errors import BadConfig
from ..levy_fft import FFTConfig
from ..montecarlo import SimConfig


class ModelSpec(BaseModel):
    type: Literal["bs", "vg"]
    sigma: float
    nu: Optional[float] = None
    theta: Optional[float] = None

    def to_domain(self) -> ModelParams:
        if self.type == "bs":
            return BlackScholes(sigma=self.sigma)
        if self.nu is None or self.theta is None:
            raise BadConfig("variance-gamma model needs 'nu' and 'theta'")
        return VarianceGamma(sigma=self.sigma, nu=self.nu, theta=self.theta)


class MarketSpec(BaseModel):
    spot: float
    rate: float

    def to_domain(self) -> Market:
        return Market(spot=self.spot, rate=self.rate)


class ScheduleSpec(BaseModel):
    n_obs: int
    tau: Optional[float] = None
    period_days: Optional[float] = None
    days_per_year: int = 365

    def to_domain(self) -> Schedule:
        if self.tau is not None:
            return Schedule(n_obs=self.n_obs, tau=self.tau,
                            days_per_year=self.days_per_year)
        if self.period_days is not None:
            return Schedule.from_days(self.n_obs, self.period_days, self.days_per_year)
        raise BadConfig("schedule needs either 'tau' or 'period_days'")


class GridOverrides(BaseModel):
    w_min: Optional[float] = None
    w_max: Optional[float] = None
    w_step: Optional[float] = None
    k_min: Optional[float] = None
    k_max: Optional[float] = None
    k_step: Optional[float] = None

    def to_domain(self, model: ModelParams) -> GridSpec:
        base = GridSpec.default_for(model)
        values = {name: getattr(self, name) if getattr(self, name) is not None
                  else getattr(base, name)
                  for name in ("w_min", "w_max", "w_step", "k_min", "k_max", "k_step")}
        return GridSpec(**values)


class FFTSpec(BaseModel):
    n_points: int = 2**14
    v_max: float = 2000.0
    alpha: float = 1.5

    def to_domain(self) -> FFTConfig:
        return FFTConfig(n_points=self.n_points, v_max=self.v_max, alpha=self.alpha)


class MCSpec(BaseModel):
    n_paths: int
    seed: int
    antithetic: bool = False
    workers: int = 1

    def to_domain(self) -> SimConfig:
        return SimConfig(n_paths=self.n_paths, seed=self.seed,
                         antithetic=self.antithetic, workers=self.workers)


class PricingSetup(BaseModel):
    """Shared request core: model, market and observation schedule."""

    model: ModelSpec
    market: MarketSpec
    schedule: ScheduleSpec
    grid: Optional[GridOverrides] = None
    fft: Optional[FFTSpec] = None


class PriceRequest(PricingSetup):
    strike: float
    with_delta: bool = False
    fixings: list[float] = Field(default_factory=list)


class PriceResponse(BaseModel):
    strike: float
    price: float
    delta: Optional[float] = None


class TableRequest(PricingSetup):
    strikes: list[float]
    with_mc: bool = False
    mc: Optional[MCSpec] = None


class TableRow(BaseModel):
    strike: float
    price: float
    delta: float
    mc_price: Optional[float] = None
    mc_se: Optional[float] = None


class TableResponse(BaseModel):
    rows: list[TableRow]


class MCRequest(PricingSetup):
    strikes: list[float]
    mc: MCSpec


class MCRow(BaseModel):
    strike: float
    estimate: float
    std_error: float
    n_paths: int
    seed: int


class MCResponse(BaseModel):
    rows: list[MCRow]


class EuropeanRequest(PricingSetup):
    strikes: list[float]


class EuropeanRow(BaseModel):
    strike: float
    call: float
    put: float
    phi: float
    parity_residual: float


class EuropeanResponse(BaseModel):
    rows: list[EuropeanRow]


class ErrorBody(BaseModel):
    error: str
    detail: str

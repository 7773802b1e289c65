"""Arithmetic Asian option pricing with discrete observation times.

The price of an average-price call is built recursively, one observation at a
time, from one-period European option prices: Black-Scholes in closed form or
exponential variance-gamma via Fourier inversion.  A seeded Monte Carlo
engine provides an independent oracle, and a FastAPI service plus CLI expose
the engine for batch and interactive use.
"""

from .domain import (
    BlackScholes,
    GridSpec,
    Market,
    MCResult,
    ModelParams,
    NormalizedCurve,
    PhiCurve,
    Schedule,
    VarianceGamma,
    validate,
)
from .errors import (
    BadConfig,
    BadFixings,
    BadGrid,
    ConfigurationError,
    GridTooCoarse,
    NonPositiveSigma,
    NumericalError,
    OutOfCoverage,
    PricingError,
    StrikeOutOfGrid,
    VGInadmissible,
)
from .european import BlackScholesPricer, EuropeanPricer, bs_call, bs_greeks, put_from_call
from .levy_fft import FFTConfig, VarianceGammaPricer, fft_call_curve, vg_omega
from .montecarlo import SimConfig, mc_asian_price, mc_european_price
from .recursion import RecursionConfig, delta, expect_via_options, price, prices, seasoned_price

__version__ = "0.1.0"

__all__ = [
    "BadConfig",
    "BadFixings",
    "BadGrid",
    "BlackScholes",
    "BlackScholesPricer",
    "ConfigurationError",
    "EuropeanPricer",
    "FFTConfig",
    "GridSpec",
    "GridTooCoarse",
    "MCResult",
    "Market",
    "ModelParams",
    "NonPositiveSigma",
    "NormalizedCurve",
    "NumericalError",
    "OutOfCoverage",
    "PhiCurve",
    "PricingError",
    "RecursionConfig",
    "Schedule",
    "SimConfig",
    "StrikeOutOfGrid",
    "VGInadmissible",
    "VarianceGamma",
    "VarianceGammaPricer",
    "bs_call",
    "bs_greeks",
    "delta",
    "expect_via_options",
    "fft_call_curve",
    "mc_asian_price",
    "mc_european_price",
    "price",
    "prices",
    "put_from_call",
    "seasoned_price",
    "validate",
    "vg_omega",
]

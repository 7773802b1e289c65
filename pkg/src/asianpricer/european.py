"""Closed-form Black-Scholes European pricing and the OTM price selector.

The normal CDF comes from :func:`scipy.special.ndtr` (erf-based, absolute
error well below 1e-12); the recursion integrates second derivatives of these
prices, so CDF noise matters.
"""
from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

log = logging.getLogger(__name__)

# Below this sigma*sqrt(tau) the lognormal degenerates; use the deterministic
# payoff limit instead of evaluating d1 = 0/0.
_DETERMINISTIC_WIDTH = 1e-12

_PARITY_FLOOR_LOG_THRESHOLD = 1e-8


def norm_cdf(x):
    return ndtr(x)


def norm_pdf(x):
    return np.exp(-0.5 * np.asarray(x, dtype=float) ** 2) / np.sqrt(2.0 * np.pi)


def _d1_d2(x: float, strikes: np.ndarray, rate: float, sigma: float, tau: float):
    width = sigma * np.sqrt(tau)
    with np.errstate(divide="ignore"):
        d1 = (np.log(x / strikes) + (rate + 0.5 * sigma**2) * tau) / width
    return d1, d1 - width


def bs_call(x: float, strike, rate: float, sigma: float, tau: float):
    """Black-Scholes call price x*N(d1) - K*e^{-r tau}*N(d2).

    Accepts a scalar or array of strikes.  K = 0 is handled as the limit
    (price = x), and a vanishing sigma*sqrt(tau) as the deterministic payoff.
    """
    if not x > 0:
        raise ValueError(f"spot must be positive, got {x}")
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    strikes = np.asarray(strike, dtype=float)
    if np.any(strikes < 0):
        raise ValueError("strikes must be nonnegative")
    disc = np.exp(-rate * tau)
    if sigma * np.sqrt(tau) < _DETERMINISTIC_WIDTH:
        out = np.maximum(x - strikes * disc, 0.0)
    else:
        d1, d2 = _d1_d2(x, strikes, rate, sigma, tau)
        out = np.where(strikes > 0, x * ndtr(d1) - strikes * disc * ndtr(d2), x)
    return out if out.ndim else float(out)


def put_from_call(call, x: float, strike, rate: float, tau: float):
    """Put by parity: p = c - x + K*e^{-r tau}, floored at zero.

    A floor activation beyond rounding noise means the call input violated
    parity bounds; it is logged rather than raised.
    """
    raw = np.asarray(call, dtype=float) - x + np.asarray(strike, dtype=float) * np.exp(-rate * tau)
    out = np.maximum(raw, 0.0)
    worst = float(np.min(raw))
    if worst < -_PARITY_FLOOR_LOG_THRESHOLD:
        log.warning("parity put floored by %.3e at strike(s) below spot forward", -worst)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class BSGreeks:
    """First and second partial derivatives of the call in spot and strike."""

    dc_dx: float
    dc_dk: float
    d2c_dx2: float
    d2c_dk2: float
    d2c_dxdk: float


def bs_greeks(x: float, strike: float, rate: float, sigma: float, tau: float) -> BSGreeks:
    """Closed-form call sensitivities:

    dc/dx = N(d1),  dc/dK = -e^{-r tau} N(d2),  d2c/dx2 = N'(d1)/(x s),
    d2c/dK2 = e^{-r tau} N'(d2)/(K s),  d2c/dxdK = -N'(d1)/(K s),
    with s = sigma*sqrt(tau).  The mixed term is d/dK of N(d1), i.e. carries
    no discount factor; finite differences of the price pin this form.
    """
    if not (x > 0 and strike > 0 and sigma > 0 and tau > 0):
        raise ValueError("x, strike, sigma and tau must all be positive")
    width = sigma * np.sqrt(tau)
    d1, d2 = _d1_d2(x, np.asarray(strike, dtype=float), rate, sigma, tau)
    disc = np.exp(-rate * tau)
    return BSGreeks(
        dc_dx=float(ndtr(d1)),
        dc_dk=float(-disc * ndtr(d2)),
        d2c_dx2=float(norm_pdf(d1) / (x * width)),
        d2c_dk2=float(disc * norm_pdf(d2) / (strike * width)),
        d2c_dxdk=float(-norm_pdf(d1) / (strike * width)),
    )


class EuropeanPricer(ABC):
    """One-period European pricer: call prices plus the derived put and the
    out-of-the-money selector used by the recursion integrals."""

    rate: float

    @abstractmethod
    def call(self, x: float, strike, tau: float):
        """Call price(s) at spot ``x`` for scalar or array strikes."""

    def put(self, x: float, strike, tau: float):
        return put_from_call(self.call(x, strike, tau), x, strike, self.rate, tau)

    def phi(self, x: float, strike, tau: float):
        """Put for strikes at or below the forward e^{r tau} x, call above."""
        strikes = np.asarray(strike, dtype=float)
        if np.any(strikes <= 0):
            raise ValueError("phi requires positive strikes")
        calls = np.asarray(self.call(x, strikes, tau), dtype=float)
        puts = put_from_call(calls, x, strikes, self.rate, tau)
        out = np.where(strikes <= x * np.exp(self.rate * tau), puts, calls)
        return out if out.ndim else float(out)


class BlackScholesPricer(EuropeanPricer):
    def __init__(self, sigma: float, rate: float):
        if not sigma > 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        self.sigma = sigma
        self.rate = rate

    def call(self, x: float, strike, tau: float):
        return bs_call(x, strike, self.rate, self.sigma, tau)


def phi(x: float, strike, rate: float, tau: float, pricer: EuropeanPricer):
    """OTM European price via an explicit pricer (kept for symmetry with the
    pricer-agnostic call sites; equivalent to ``pricer.phi``)."""
    if abs(pricer.rate - rate) > 1e-15:
        raise ValueError("pricer was built for a different rate")
    return pricer.phi(x, strike, tau)

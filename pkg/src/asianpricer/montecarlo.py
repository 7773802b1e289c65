"""Seeded Monte Carlo oracle for Asian and European prices.

Paths are partitioned into fixed-size blocks; block ``b`` draws from its own
counter-based Philox substream keyed by (seed, b), and per-block partial sums
are merged in block order.  Results are therefore bit-identical for any
worker count, which is the contract the verification suite relies on.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import ndtri

from .domain import BlackScholes, Market, MCResult, ModelParams, Schedule, VarianceGamma
from .errors import BadConfig
from .levy_fft import vg_omega

BLOCK_SIZE = 1 << 16

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SimConfig:
    n_paths: int
    seed: int
    antithetic: bool = False
    workers: int = 1

    def __post_init__(self) -> None:
        if self.n_paths < 1:
            raise BadConfig(f"n_paths must be >= 1, got {self.n_paths}")
        if self.workers < 1:
            raise BadConfig(f"workers must be >= 1, got {self.workers}")
        if self.antithetic and self.n_paths % 2:
            raise BadConfig("antithetic sampling needs an even n_paths")


def _substream(seed: int, block_index: int) -> Generator:
    key = ((int(seed) & _MASK64) << 64) | (block_index & _MASK64)
    return Generator(Philox(key=key))


def _normals(rng: Generator, n: int) -> np.ndarray:
    # inverse-CDF sampling keeps antithetic pairing exact: Z(1-U) = -Z(U)
    u = rng.random(n)
    return ndtri(np.maximum(u, 1e-300))


def _gamma_increments(rng: Generator, shape: float, scale: float, n: int) -> np.ndarray:
    """Gamma(shape, scale) draws, stable for the tiny shapes a short period
    implies: boost Gamma(shape+1) by U^(1/shape) when shape < 1."""
    if shape >= 1.0:
        return rng.standard_gamma(shape, n) * scale
    boosted = rng.standard_gamma(shape + 1.0, n)
    u = rng.random(n)
    return boosted * u ** (1.0 / shape) * scale


def _block_sizes(n_paths: int) -> list[int]:
    sizes = [BLOCK_SIZE] * (n_paths // BLOCK_SIZE)
    if n_paths % BLOCK_SIZE:
        sizes.append(n_paths % BLOCK_SIZE)
    return sizes


def _gbm_fixings_block(market: Market, sigma: float, schedule: Schedule,
                       rng: Generator, n: int, antithetic: bool) -> np.ndarray:
    drift = (market.rate - 0.5 * sigma**2) * schedule.tau
    width = sigma * np.sqrt(schedule.tau)
    half = n // 2 if antithetic else n
    log_s = np.zeros(n)
    fixings = np.empty((n, schedule.n_obs))
    for j in range(schedule.n_obs):
        z = _normals(rng, half)
        if antithetic:
            z = np.concatenate([z, -z])
        log_s += drift + width * z
        fixings[:, j] = market.spot * np.exp(log_s)
    return fixings


def _vg_fixings_block(market: Market, model: VarianceGamma, schedule: Schedule,
                      rng: Generator, n: int, antithetic: bool) -> np.ndarray:
    omega = vg_omega(model.sigma, model.nu, model.theta)
    drift = (market.rate + omega) * schedule.tau
    shape = schedule.tau / model.nu
    half = n // 2 if antithetic else n
    log_s = np.zeros(n)
    fixings = np.empty((n, schedule.n_obs))
    for j in range(schedule.n_obs):
        clock = _gamma_increments(rng, shape, model.nu, half)
        z = _normals(rng, half)
        if antithetic:
            # flip the Brownian part only; the gamma clock is shared by a pair
            clock = np.concatenate([clock, clock])
            z = np.concatenate([z, -z])
        log_s += drift + model.theta * clock + model.sigma * np.sqrt(clock) * z
        fixings[:, j] = market.spot * np.exp(log_s)
    return fixings


def _fixings_block_fn(model: ModelParams, market: Market,
                      schedule: Schedule) -> Callable[[Generator, int, bool], np.ndarray]:
    if isinstance(model, BlackScholes):
        return lambda rng, n, anti: _gbm_fixings_block(market, model.sigma, schedule, rng, n, anti)
    return lambda rng, n, anti: _vg_fixings_block(market, model, schedule, rng, n, anti)


def simulate_gbm_fixings(market: Market, sigma: float, schedule: Schedule,
                         sim: SimConfig) -> Iterator[np.ndarray]:
    """Stream (paths, n_obs) blocks of observation-time prices under exact
    lognormal stepping."""
    for b, n in enumerate(_block_sizes(sim.n_paths)):
        yield _gbm_fixings_block(market, sigma, schedule, _substream(sim.seed, b),
                                 n, sim.antithetic)


def simulate_vg_fixings(market: Market, model: VarianceGamma, schedule: Schedule,
                        sim: SimConfig) -> Iterator[np.ndarray]:
    """Stream (paths, n_obs) blocks under the exponential variance-gamma
    dynamics, gamma clock increments per period."""
    for b, n in enumerate(_block_sizes(sim.n_paths)):
        yield _vg_fixings_block(market, model, schedule, _substream(sim.seed, b),
                                n, sim.antithetic)


def _payoff_moments(model: ModelParams, market: Market, schedule: Schedule,
                    strike: float, sim: SimConfig) -> tuple[float, float, int]:
    block_fn = _fixings_block_fn(model, market, schedule)
    discount = np.exp(-market.rate * schedule.maturity)
    sizes = _block_sizes(sim.n_paths)

    def one_block(b: int) -> tuple[float, float, int]:
        fixings = block_fn(_substream(sim.seed, b), sizes[b], sim.antithetic)
        payoff = discount * np.maximum(fixings.mean(axis=1) - strike, 0.0)
        if sim.antithetic:
            half = len(payoff) // 2
            payoff = 0.5 * (payoff[:half] + payoff[half:])
        return float(payoff.sum()), float((payoff * payoff).sum()), len(payoff)

    if sim.workers == 1:
        results = [one_block(b) for b in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=sim.workers) as pool:
            results = list(pool.map(one_block, range(len(sizes))))

    total = total_sq = 0.0
    count = 0
    for s, s2, m in results:  # fixed block order keeps the sums deterministic
        total += s
        total_sq += s2
        count += m
    return total, total_sq, count


def _result_from_moments(total: float, total_sq: float, count: int,
                         sim: SimConfig) -> MCResult:
    mean = total / count
    if count > 1:
        variance = max(total_sq - count * mean * mean, 0.0) / (count - 1)
        std_error = float(np.sqrt(variance / count))
    else:
        std_error = 0.0
    return MCResult(estimate=float(mean), std_error=std_error,
                    n_paths=sim.n_paths, seed=sim.seed)


def mc_asian_price(model: ModelParams, market: Market, schedule: Schedule,
                   strike: float, sim: SimConfig) -> MCResult:
    """Discounted-payoff mean and standard error of the arithmetic Asian call."""
    if not strike >= 0:
        raise BadConfig(f"strike must be nonnegative, got {strike}")
    total, total_sq, count = _payoff_moments(model, market, schedule, strike, sim)
    return _result_from_moments(total, total_sq, count, sim)


def mc_european_price(model: ModelParams, market: Market, tau: float,
                      strike: float, sim: SimConfig) -> MCResult:
    """European call estimate: a single observation at maturity tau."""
    schedule = Schedule(n_obs=1, tau=tau)
    return mc_asian_price(model, market, schedule, strike, sim)

"""Shared fixtures: the expensive 90-step ladders are built once per session."""
from __future__ import annotations

import time
from dataclasses import dataclass

import pytest

from asianpricer import BlackScholes, Market, Schedule, VarianceGamma
from asianpricer.domain import NormalizedCurve, curve_diagnostics
from asianpricer.recursion import RecursionConfig, iter_curves, pricer_for

DAY = 1.0 / 365.0

# benchmark setups: 90 daily observations, spot 100, rate 5%
BS_SIGMA = 0.2
VG_PARAMS = dict(sigma=0.3, nu=0.3, theta=-0.1)
RATE = 0.05
SPOT = 100.0
N_OBS = 90


@dataclass
class LadderRun:
    final: NormalizedCurve
    diagnostics: list[dict]
    seconds: float
    rate: float
    tau: float
    market: Market
    schedule: Schedule


def _run_ladder(model, market: Market, schedule: Schedule, cfg: RecursionConfig) -> LadderRun:
    pricer = pricer_for(model, market.rate)
    diagnostics = []
    curve = None
    start = time.perf_counter()
    for curve in iter_curves(pricer, market.rate, schedule.tau, schedule.n_obs, cfg):
        diagnostics.append(curve_diagnostics(curve, market.rate, schedule.tau))
    seconds = time.perf_counter() - start
    assert curve is not None
    return LadderRun(final=curve, diagnostics=diagnostics, seconds=seconds,
                     rate=market.rate, tau=schedule.tau, market=market,
                     schedule=schedule)


@pytest.fixture(scope="session")
def bs_model() -> BlackScholes:
    return BlackScholes(sigma=BS_SIGMA)


@pytest.fixture(scope="session")
def vg_model() -> VarianceGamma:
    return VarianceGamma(**VG_PARAMS)


@pytest.fixture(scope="session")
def market() -> Market:
    return Market(spot=SPOT, rate=RATE)


@pytest.fixture(scope="session")
def bs_ladder(bs_model, market) -> LadderRun:
    schedule = Schedule(n_obs=N_OBS, tau=DAY)
    return _run_ladder(bs_model, market, schedule, RecursionConfig.default_for(bs_model))


@pytest.fixture(scope="session")
def vg_ladder(vg_model, market) -> LadderRun:
    schedule = Schedule(n_obs=N_OBS, tau=DAY)
    return _run_ladder(vg_model, market, schedule, RecursionConfig.default_for(vg_model))

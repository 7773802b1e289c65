"""Request handlers shared by the HTTP routes and the in-process CLI client.

Curve ladders are the expensive part of a request, so finished curves are
kept in a small LRU cache keyed by the (hashable) domain configuration; a
long-running service repeatedly pricing the same book reuses them.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .. import recursion
from ..domain import GridSpec, Market, ModelParams, NormalizedCurve, Schedule
from ..errors import BadConfig
from ..levy_fft import FFTConfig
from ..montecarlo import mc_asian_price
from . import schemas


@lru_cache(maxsize=16)
def _cached_curve(model: ModelParams, market: Market, schedule: Schedule,
                  grid: GridSpec, fft: FFTConfig) -> NormalizedCurve:
    cfg = recursion.RecursionConfig(grid=grid)
    return recursion.final_curve(model, market, schedule, cfg, fft)


def _setup(req: schemas.PricingSetup):
    model = req.model.to_domain()
    market = req.market.to_domain()
    schedule = req.schedule.to_domain()
    grid = (req.grid or schemas.GridOverrides()).to_domain(model)
    fft = (req.fft or schemas.FFTSpec()).to_domain()
    return model, market, schedule, grid, fft


def compute_price(req: schemas.PriceRequest) -> schemas.PriceResponse:
    model, market, schedule, grid, fft = _setup(req)
    if req.fixings:
        cfg = recursion.RecursionConfig(grid=grid)
        value = recursion.seasoned_price(model, market, schedule, req.strike,
                                         req.fixings, cfg, fft)
        return schemas.PriceResponse(strike=req.strike, price=value)
    curve = _cached_curve(model, market, schedule, grid, fft)
    value = recursion.price_from_curve(curve, market, market.rate, schedule.tau, req.strike)
    result = schemas.PriceResponse(strike=req.strike, price=value)
    if req.with_delta:
        result.delta = recursion.delta_from_curve(curve, market, market.rate,
                                                  schedule.tau, req.strike)
    return result


def compute_table(req: schemas.TableRequest) -> schemas.TableResponse:
    if not req.strikes:
        raise BadConfig("table runs need a nonempty strikes list")
    model, market, schedule, grid, fft = _setup(req)
    curve = _cached_curve(model, market, schedule, grid, fft)
    mc_cfg = req.mc.to_domain() if (req.with_mc and req.mc) else None
    if req.with_mc and mc_cfg is None:
        raise BadConfig("with_mc requires an mc block (n_paths, seed)")
    rows = []
    for strike in req.strikes:
        row = schemas.TableRow(
            strike=strike,
            price=recursion.price_from_curve(curve, market, market.rate,
                                             schedule.tau, strike),
            delta=recursion.delta_from_curve(curve, market, market.rate,
                                             schedule.tau, strike),
        )
        if mc_cfg is not None:
            mc = mc_asian_price(model, market, schedule, strike, mc_cfg)
            row.mc_price = mc.estimate
            row.mc_se = mc.std_error
        rows.append(row)
    return schemas.TableResponse(rows=rows)


def compute_mc(req: schemas.MCRequest) -> schemas.MCResponse:
    if not req.strikes:
        raise BadConfig("mc runs need a nonempty strikes list")
    model, market, schedule, _, _ = _setup(req)
    sim = req.mc.to_domain()
    rows = []
    for strike in req.strikes:
        result = mc_asian_price(model, market, schedule, strike, sim)
        rows.append(schemas.MCRow(strike=strike, estimate=result.estimate,
                                  std_error=result.std_error,
                                  n_paths=result.n_paths, seed=result.seed))
    return schemas.MCResponse(rows=rows)


def compute_european(req: schemas.EuropeanRequest) -> schemas.EuropeanResponse:
    if not req.strikes:
        raise BadConfig("european runs need a nonempty strikes list")
    model, market, schedule, _, fft = _setup(req)
    pricer = recursion.pricer_for(model, market.rate, fft)
    tau = schedule.tau
    rows = []
    for strike in req.strikes:
        call = float(np.asarray(pricer.call(market.spot, strike, tau)))
        put = float(np.asarray(pricer.put(market.spot, strike, tau)))
        otm = float(np.asarray(pricer.phi(market.spot, strike, tau)))
        residual = call - put - market.spot + strike * np.exp(-market.rate * tau)
        rows.append(schemas.EuropeanRow(strike=strike, call=call, put=put,
                                        phi=otm, parity_residual=float(residual)))
    return schemas.EuropeanResponse(rows=rows)

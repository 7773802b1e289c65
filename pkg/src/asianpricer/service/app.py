"""FastAPI application exposing the pricing engine.

Run with:  uvicorn asianpricer.service.app:app
"""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import ConfigurationError, PricingError
from . import handlers, schemas

app = FastAPI(
    title="asianpricer",
    description="Arithmetic Asian option pricing via the recursive "
                "European-option-integral method, with a Monte Carlo oracle.",
    version="0.1.0",
)


@app.exception_handler(PricingError)
async def pricing_error_handler(_request: Request, exc: PricingError) -> JSONResponse:
    status = 400 if isinstance(exc, ConfigurationError) else 422
    body = schemas.ErrorBody(error=exc.name, detail=str(exc))
    return JSONResponse(status_code=status, content=body.model_dump())


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/price", response_model=schemas.PriceResponse)
def price(req: schemas.PriceRequest) -> schemas.PriceResponse:
    return handlers.compute_price(req)


@app.post("/table", response_model=schemas.TableResponse)
def table(req: schemas.TableRequest) -> schemas.TableResponse:
    return handlers.compute_table(req)


@app.post("/mc", response_model=schemas.MCResponse)
def mc(req: schemas.MCRequest) -> schemas.MCResponse:
    return handlers.compute_mc(req)


@app.post("/european", response_model=schemas.EuropeanResponse)
def european(req: schemas.EuropeanRequest) -> schemas.EuropeanResponse:
    return handlers.compute_european(req)

"""Command-line front end.

A thin client over the pricing service: parses a config file plus flag
overrides, builds the same request models the HTTP API accepts, and either
calls the service handlers in process (default) or POSTs them to a running
server (``--server``).  Output is CSV or JSON; exit codes are 0 on success,
2 for configuration errors and 3 for numerical failures.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .config import RunConfig, effective_config_text, load_config, parse_strikes
from .domain import BlackScholes
from .errors import BadConfig, PricingError
from .montecarlo import SimConfig
from .service import handlers, schemas


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="asian-pricer",
        description="Arithmetic Asian option pricing (recursive method, "
                    "Monte Carlo comparison, European diagnostics).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("price", "single-strike recursion price (optionally with delta)"),
        ("table", "price/delta rows for a strike list, optionally with MC columns"),
        ("mc", "Monte Carlo estimates for a strike list"),
        ("european", "one-period European prices (diagnostics)"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="path to the INI config file")
        cmd.add_argument("--strike", type=float, help="single strike (price command)")
        cmd.add_argument("--strikes", help="comma-separated strikes, overrides the config")
        cmd.add_argument("--with-mc", action="store_true",
                         help="add Monte Carlo columns to table output")
        cmd.add_argument("--delta", action="store_true", help="also report delta")
        cmd.add_argument("--output", choices=("csv", "json"), help="output format")
        cmd.add_argument("--out", help="write output to this path instead of stdout")
        cmd.add_argument("--seed", type=int, help="override the MC seed")
        cmd.add_argument("--paths", type=int, help="override the MC path count")
        cmd.add_argument("--workers", type=int, help="override the MC worker count")
        cmd.add_argument("--server", help="base URL of a running pricing service")
        cmd.add_argument("--dump-config", action="store_true",
                         help="print the effective configuration and exit")
    return parser


def _model_spec(cfg: RunConfig) -> schemas.ModelSpec:
    if isinstance(cfg.model, BlackScholes):
        return schemas.ModelSpec(type="bs", sigma=cfg.model.sigma)
    return schemas.ModelSpec(type="vg", sigma=cfg.model.sigma,
                             nu=cfg.model.nu, theta=cfg.model.theta)


def _setup_spec(cfg: RunConfig) -> dict:
    return {
        "model": _model_spec(cfg),
        "market": schemas.MarketSpec(spot=cfg.market.spot, rate=cfg.market.rate),
        "schedule": schemas.ScheduleSpec(n_obs=cfg.schedule.n_obs, tau=cfg.schedule.tau,
                                         days_per_year=cfg.schedule.days_per_year),
        "grid": schemas.GridOverrides(**{f: getattr(cfg.grid, f) for f in
                                         ("w_min", "w_max", "w_step",
                                          "k_min", "k_max", "k_step")}),
        "fft": schemas.FFTSpec(n_points=cfg.fft.n_points, v_max=cfg.fft.v_max,
                               alpha=cfg.fft.alpha),
    }


def _effective_mc(cfg: RunConfig, args: argparse.Namespace) -> SimConfig | None:
    mc = cfg.mc
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.paths is not None:
        overrides["n_paths"] = args.paths
    if args.workers is not None:
        overrides["workers"] = args.workers
    if mc is None:
        if "seed" in overrides and "n_paths" in overrides:
            return SimConfig(n_paths=overrides["n_paths"], seed=overrides["seed"],
                             workers=overrides.get("workers", 1))
        if overrides:
            raise BadConfig("MC overrides need an [mc] config block or both --seed and --paths")
        return None
    return dataclasses.replace(mc, **overrides)


def _effective_strikes(cfg: RunConfig, args: argparse.Namespace) -> tuple[float, ...]:
    if args.strikes:
        return parse_strikes(args.strikes)
    return cfg.strikes


def _mc_spec(sim: SimConfig) -> schemas.MCSpec:
    return schemas.MCSpec(n_paths=sim.n_paths, seed=sim.seed,
                          antithetic=sim.antithetic, workers=sim.workers)


def _dispatch(command: str, request, server: str | None):
    """Run a request in process, or against a remote service."""
    if server is None:
        fn = {"price": handlers.compute_price, "table": handlers.compute_table,
              "mc": handlers.compute_mc, "european": handlers.compute_european}[command]
        return fn(request)

    import httpx

    response_types = {"price": schemas.PriceResponse, "table": schemas.TableResponse,
                      "mc": schemas.MCResponse, "european": schemas.EuropeanResponse}
    try:
        reply = httpx.post(f"{server.rstrip('/')}/{command}",
                           json=request.model_dump(), timeout=600.0)
    except httpx.HTTPError as exc:
        raise PricingError(f"service request failed: {exc}") from exc
    if reply.status_code != 200:
        try:
            body = reply.json()
        except ValueError:
            body = {}
        err = PricingError(body.get("detail", reply.text))
        err.name = body.get("error", "ServiceError")
        err.exit_code = 2 if reply.status_code == 400 else 3
        raise err
    return response_types[command].model_validate(reply.json())


def _format_price(result: schemas.PriceResponse, want_delta: bool, output: str) -> str:
    if output == "json":
        return json.dumps(result.model_dump(exclude_none=True), indent=2) + "\n"
    lines = [f"{result.price:.4f}"]
    if want_delta and result.delta is not None:
        lines.append(f"delta={result.delta:.4f}")
    return "\n".join(lines) + "\n"


def _format_table(result: schemas.TableResponse, output: str) -> str:
    if output == "json":
        return json.dumps(result.model_dump(), indent=2) + "\n"
    lines = ["strike,price,delta,mc_price,mc_se"]
    for row in result.rows:
        mc_price = "" if row.mc_price is None else f"{row.mc_price:.4f}"
        mc_se = "" if row.mc_se is None else f"{row.mc_se:.6f}"
        lines.append(f"{row.strike:g},{row.price:.4f},{row.delta:.4f},{mc_price},{mc_se}")
    return "\n".join(lines) + "\n"


def _format_mc(result: schemas.MCResponse, output: str) -> str:
    if output == "json":
        return json.dumps(result.model_dump(), indent=2) + "\n"
    lines = ["strike,estimate,std_error,n_paths,seed"]
    for row in result.rows:
        lines.append(f"{row.strike:g},{row.estimate!r},{row.std_error!r},"
                     f"{row.n_paths},{row.seed}")
    return "\n".join(lines) + "\n"


def _format_european(result: schemas.EuropeanResponse, output: str) -> str:
    if output == "json":
        return json.dumps(result.model_dump(), indent=2) + "\n"
    lines = ["strike,call,put,phi,parity_residual"]
    for row in result.rows:
        lines.append(f"{row.strike:g},{row.call:.6f},{row.put:.6f},"
                     f"{row.phi:.6f},{row.parity_residual:.3e}")
    return "\n".join(lines) + "\n"


def _run(args: argparse.Namespace) -> tuple[str, str | None]:
    cfg = load_config(args.config)
    out_path = args.out or cfg.output_path
    if args.dump_config:
        return effective_config_text(cfg), out_path
    output = args.output or cfg.output
    setup = _setup_spec(cfg)
    strikes = _effective_strikes(cfg, args)

    if args.command == "price":
        if args.strike is not None:
            strike = args.strike
        elif len(strikes) == 1:
            strike = strikes[0]
        else:
            raise BadConfig("price needs --strike or exactly one configured strike")
        request = schemas.PriceRequest(**setup, strike=strike, with_delta=args.delta)
        reply = _dispatch("price", request, args.server)
        return _format_price(reply, args.delta, output), out_path

    if not strikes:
        raise BadConfig(f"{args.command} needs a nonempty strikes list")

    if args.command == "table":
        sim = _effective_mc(cfg, args)
        if args.with_mc and sim is None:
            raise BadConfig("--with-mc needs an [mc] config block or --seed/--paths")
        request = schemas.TableRequest(**setup, strikes=list(strikes),
                                       with_mc=args.with_mc,
                                       mc=_mc_spec(sim) if sim else None)
        return _format_table(_dispatch("table", request, args.server), output), out_path

    if args.command == "mc":
        sim = _effective_mc(cfg, args)
        if sim is None:
            raise BadConfig("mc needs an [mc] config block or --seed and --paths")
        request = schemas.MCRequest(**setup, strikes=list(strikes), mc=_mc_spec(sim))
        return _format_mc(_dispatch("mc", request, args.server), output), out_path

    request = schemas.EuropeanRequest(**setup, strikes=list(strikes))
    return _format_european(_dispatch("european", request, args.server), output), out_path


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        text, out_path = _run(args)
    except PricingError as exc:
        print(f"{exc.name}: {exc}", file=sys.stderr)
        return exc.exit_code
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

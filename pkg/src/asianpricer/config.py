"""Run configuration: INI-style config files with CLI-flag overrides.

The effective configuration can be serialized back to text with every default
made explicit, and parsing that text reproduces the same configuration.
"""
from __future__ import annotations

import configparser
import io
from dataclasses import dataclass

from .domain import BlackScholes, GridSpec, Market, ModelParams, Schedule, VarianceGamma
from .errors import BadConfig
from .levy_fft import FFTConfig
from .montecarlo import SimConfig


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    market: Market
    schedule: Schedule
    grid: GridSpec
    fft: FFTConfig
    mc: SimConfig | None
    strikes: tuple[float, ...]
    output: str = "csv"
    output_path: str | None = None


def _get_float(section, key, default=None):
    raw = section.get(key)
    if raw is None:
        if default is None:
            raise BadConfig(f"missing required option '{key}' in [{section.name}]")
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise BadConfig(f"option '{key}' in [{section.name}] is not a number: {raw!r}") from exc


def _get_int(section, key, default=None):
    raw = section.get(key)
    if raw is None:
        if default is None:
            raise BadConfig(f"missing required option '{key}' in [{section.name}]")
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise BadConfig(f"option '{key}' in [{section.name}] is not an integer: {raw!r}") from exc


def _get_bool(section, key, default: bool) -> bool:
    raw = section.get(key)
    if raw is None:
        return default
    try:
        return section.getboolean(key)
    except ValueError as exc:
        raise BadConfig(f"option '{key}' in [{section.name}] is not a boolean: {raw!r}") from exc


def parse_config_text(text: str) -> RunConfig:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise BadConfig(f"malformed config file: {exc}") from exc

    if "model" not in parser:
        raise BadConfig("config needs a [model] section")
    model_sec = parser["model"]
    kind = model_sec.get("type", "").strip().lower()
    if kind == "bs":
        model: ModelParams = BlackScholes(sigma=_get_float(model_sec, "sigma"))
    elif kind == "vg":
        model = VarianceGamma(sigma=_get_float(model_sec, "sigma"),
                              nu=_get_float(model_sec, "nu"),
                              theta=_get_float(model_sec, "theta"))
    else:
        raise BadConfig(f"[model] type must be 'bs' or 'vg', got {kind!r}")

    if "market" not in parser:
        raise BadConfig("config needs a [market] section")
    market = Market(spot=_get_float(parser["market"], "spot"),
                    rate=_get_float(parser["market"], "rate"))

    if "schedule" not in parser:
        raise BadConfig("config needs a [schedule] section")
    sched_sec = parser["schedule"]
    n_obs = _get_int(sched_sec, "n_obs")
    days_per_year = _get_int(sched_sec, "days_per_year", 365)
    if "tau" in sched_sec:
        schedule = Schedule(n_obs=n_obs, tau=_get_float(sched_sec, "tau"),
                            days_per_year=days_per_year)
    elif "period_days" in sched_sec:
        schedule = Schedule.from_days(n_obs, _get_float(sched_sec, "period_days"),
                                      days_per_year)
    else:
        raise BadConfig("[schedule] needs either 'tau' or 'period_days'")

    defaults = GridSpec.default_for(model)
    if "grid" in parser:
        g = parser["grid"]
        grid = GridSpec(w_min=_get_float(g, "w_min", defaults.w_min),
                        w_max=_get_float(g, "w_max", defaults.w_max),
                        w_step=_get_float(g, "w_step", defaults.w_step),
                        k_min=_get_float(g, "k_min", defaults.k_min),
                        k_max=_get_float(g, "k_max", defaults.k_max),
                        k_step=_get_float(g, "k_step", defaults.k_step))
    else:
        grid = defaults

    fft_defaults = FFTConfig()
    if "fft" in parser:
        f = parser["fft"]
        fft = FFTConfig(n_points=_get_int(f, "n_points", fft_defaults.n_points),
                        v_max=_get_float(f, "v_max", fft_defaults.v_max),
                        alpha=_get_float(f, "alpha", fft_defaults.alpha))
    else:
        fft = fft_defaults

    mc = None
    if "mc" in parser:
        m = parser["mc"]
        mc = SimConfig(n_paths=_get_int(m, "n_paths"),
                       seed=_get_int(m, "seed"),
                       antithetic=_get_bool(m, "antithetic", False),
                       workers=_get_int(m, "workers", 1))

    strikes: tuple[float, ...] = ()
    if "strikes" in parser:
        strikes = parse_strikes(parser["strikes"].get("values", ""))

    output = "csv"
    output_path = None
    if "output" in parser:
        output = parser["output"].get("format", "csv").strip().lower()
        output_path = parser["output"].get("path") or None
    if output not in ("csv", "json"):
        raise BadConfig(f"[output] format must be 'csv' or 'json', got {output!r}")

    return RunConfig(model=model, market=market, schedule=schedule, grid=grid,
                     fft=fft, mc=mc, strikes=strikes, output=output,
                     output_path=output_path)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise BadConfig(f"cannot read config file {path}: {exc}") from exc


def parse_strikes(raw: str) -> tuple[float, ...]:
    """Comma-separated strike list, e.g. '80,85,90'."""
    items = [chunk.strip() for chunk in raw.split(",") if chunk.strip()]
    try:
        strikes = tuple(float(item) for item in items)
    except ValueError as exc:
        raise BadConfig(f"strikes must be numbers, got {raw!r}") from exc
    if any(s <= 0 for s in strikes):
        raise BadConfig("strikes must be positive")
    return strikes


def effective_config_text(cfg: RunConfig) -> str:
    """Serialize with every default written out explicitly; parsing the result
    reproduces the configuration."""
    parser = configparser.ConfigParser()
    if isinstance(cfg.model, BlackScholes):
        parser["model"] = {"type": "bs", "sigma": repr(cfg.model.sigma)}
    else:
        parser["model"] = {"type": "vg", "sigma": repr(cfg.model.sigma),
                           "nu": repr(cfg.model.nu), "theta": repr(cfg.model.theta)}
    parser["market"] = {"spot": repr(cfg.market.spot), "rate": repr(cfg.market.rate)}
    parser["schedule"] = {"n_obs": str(cfg.schedule.n_obs),
                          "tau": repr(cfg.schedule.tau),
                          "days_per_year": str(cfg.schedule.days_per_year)}
    parser["grid"] = {k: repr(getattr(cfg.grid, k))
                      for k in ("w_min", "w_max", "w_step", "k_min", "k_max", "k_step")}
    parser["fft"] = {"n_points": str(cfg.fft.n_points),
                     "v_max": repr(cfg.fft.v_max),
                     "alpha": repr(cfg.fft.alpha)}
    if cfg.mc is not None:
        parser["mc"] = {"n_paths": str(cfg.mc.n_paths), "seed": str(cfg.mc.seed),
                        "antithetic": str(cfg.mc.antithetic).lower(),
                        "workers": str(cfg.mc.workers)}
    if cfg.strikes:
        parser["strikes"] = {"values": ",".join(repr(s) for s in cfg.strikes)}
    parser["output"] = {"format": cfg.output}
    if cfg.output_path:
        parser["output"]["path"] = cfg.output_path
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()

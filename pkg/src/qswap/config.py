"""INI-style run configuration.

Sections ``[channel]``, ``[swap]``, ``[sweep]`` and ``[check]``; arrays are
written ``[v0, v1, ...]``. See ``configs/example.ini`` for every key.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .channels import SchmidtChannel, make_channel
from .errors import ConfigError, SwapError
from .sweep import AUTO, FREE, GridSpec, SweepConfig
from .verify import CheckConfig

KEYS: dict[str, set[str]] = {
    "channel": {"dim_a", "dim_b", "c", "d"},
    "swap": {"strategies", "beta_max", "objective", "threshold_e", "threshold_f", "effective"},
    "sweep": {"dim_a", "dim_b", "c", "d", "c_min", "c_max", "d_min", "d_max", "grid", "betas", "strategies"},
    "check": {"n_channels", "seed", "tolerance", "dims_a", "dim_b_max", "zero_prob", "mc_samples"},
}


@dataclass
class SwapOptions:
    strategies: tuple[str, ...] = ("me", "mc", "smc")
    beta_max: str = "full"  # integer, "full" or "adaptive"
    objective: str = "e"
    threshold_e: float | None = None
    threshold_f: float | None = None
    effective: bool = False


@dataclass
class RunConfig:
    channel: SchmidtChannel | None = None
    swap: SwapOptions = field(default_factory=SwapOptions)
    sweep: SweepConfig | None = None
    check: CheckConfig = field(default_factory=CheckConfig)
    mc_samples: int = 0


def parse_array(text: str, key: str) -> list[str]:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ConfigError(f"{key}: expected a bracketed list, got {text!r}")
    body = text[1:-1].strip()
    return [tok.strip() for tok in body.split(",")] if body else []


def _number(tok: str, key: str) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ConfigError(f"{key}: {tok!r} is not a number") from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: {tok!r} is not finite")
    return v


def _int(tok: str, key: str) -> int:
    v = _number(tok, key)
    if v != int(v):
        raise ConfigError(f"{key}: {tok!r} is not an integer")
    return int(v)


def _bool(tok: str, key: str) -> bool:
    low = tok.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: {tok!r} is not a boolean")


def parse_coefficients(text: str, key: str, allow_free: bool = False) -> list:
    """Numbers plus at most one ``auto`` (and one ``free`` if allowed)."""
    out: list = []
    for tok in parse_array(text, key):
        low = tok.lower()
        if low == AUTO or (allow_free and low == FREE):
            out.append(low)
        else:
            out.append(_number(tok, key))
    for marker in (AUTO, FREE):
        if out.count(marker) > 1:
            raise ConfigError(f"{key}: at most one '{marker}' entry allowed")
    return out


def fill_auto(values: list, key: str) -> list[float]:
    if AUTO not in values:
        return values
    rest = 1.0 - sum(v * v for v in values if v != AUTO)
    if rest < -1e-12:
        raise ConfigError(f"{key}: fixed entries already exceed unit norm")
    return [math.sqrt(max(rest, 0.0)) if v == AUTO else v for v in values]


def _get(section: configparser.SectionProxy, key: str, conv: Callable, default=None):
    if key not in section:
        return default
    return conv(section[key], f"{section.name}.{key}")


def load_config(path: str | Path, renormalize: bool = False) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return config_from_parser(parser, renormalize)


def config_from_text(text: str, renormalize: bool = False) -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return config_from_parser(parser, renormalize)


def config_from_parser(parser: configparser.ConfigParser, renormalize: bool = False) -> RunConfig:
    for name in parser.sections():
        if name not in KEYS:
            raise ConfigError(f"unknown section [{name}]")
        for key in parser[name]:
            if key not in KEYS[name]:
                raise ConfigError(f"unknown key '{name}.{key}'")

    cfg = RunConfig()
    if parser.has_section("channel"):
        sec = parser["channel"]
        for key in ("dim_a", "dim_b", "c", "d"):
            if key not in sec:
                raise ConfigError(f"missing key 'channel.{key}'")
        c = fill_auto(parse_coefficients(sec["c"], "channel.c"), "channel.c")
        d = fill_auto(parse_coefficients(sec["d"], "channel.d"), "channel.d")
        try:
            cfg.channel = make_channel(
                _int(sec["dim_a"], "channel.dim_a"), _int(sec["dim_b"], "channel.dim_b"), c, d, renormalize=renormalize
            )
        except SwapError as exc:
            raise ConfigError(f"channel: {exc}") from None

    if parser.has_section("swap"):
        sec = parser["swap"]
        opts = cfg.swap
        if "strategies" in sec:
            strategies = tuple(t.lower() for t in parse_array(sec["strategies"], "swap.strategies"))
            bad = [t for t in strategies if t not in ("me", "mc", "smc")]
            if bad:
                raise ConfigError(f"swap.strategies: unknown strategy {bad[0]!r}")
            opts.strategies = strategies
        if "beta_max" in sec:
            opts.beta_max = _beta_spec(sec["beta_max"], "swap.beta_max")
        if "objective" in sec:
            obj = sec["objective"].strip().lower()
            if obj not in ("e", "f"):
                raise ConfigError("swap.objective: expected 'e' or 'f'")
            opts.objective = obj
        opts.threshold_e = _get(sec, "threshold_e", _number)
        opts.threshold_f = _get(sec, "threshold_f", _number)
        opts.effective = _get(sec, "effective", _bool, False)

    if parser.has_section("sweep"):
        sec = parser["sweep"]
        kw = {}
        if "dim_a" in sec:
            kw["dim_a"] = _int(sec["dim_a"], "sweep.dim_a")
        if "dim_b" in sec:
            kw["dim_b"] = _int(sec["dim_b"], "sweep.dim_b")
        if "c" in sec:
            kw["c_template"] = tuple(parse_coefficients(sec["c"], "sweep.c", allow_free=True))
        if "d" in sec:
            kw["d_template"] = tuple(parse_coefficients(sec["d"], "sweep.d", allow_free=True))
        num = _get(sec, "grid", _int, 101)
        kw["c_grid"] = GridSpec(_get(sec, "c_min", _number, 0.0), _get(sec, "c_max", _number), num)
        kw["d_grid"] = GridSpec(_get(sec, "d_min", _number, 0.0), _get(sec, "d_max", _number), num)
        if "betas" in sec:
            kw["betas"] = tuple(_int(t, "sweep.betas") for t in parse_array(sec["betas"], "sweep.betas"))
        if "strategies" in sec:
            kw["strategies"] = tuple(t.lower() for t in parse_array(sec["strategies"], "sweep.strategies"))
        try:
            cfg.sweep = SweepConfig(**kw)
        except ValueError as exc:
            raise ConfigError(f"sweep: {exc}") from None

    if parser.has_section("check"):
        sec = parser["check"]
        kw = {}
        for key, conv in (("n_channels", _int), ("seed", _int), ("tolerance", _number), ("dim_b_max", _int), ("zero_prob", _number)):
            if key in sec:
                kw[key] = conv(sec[key], f"check.{key}")
        if "dims_a" in sec:
            kw["dims_a"] = tuple(_int(t, "check.dims_a") for t in parse_array(sec["dims_a"], "check.dims_a"))
        try:
            cfg.check = CheckConfig(**kw)
        except ValueError as exc:
            raise ConfigError(f"check: {exc}") from None
        cfg.mc_samples = _get(sec, "mc_samples", _int, 0)
    return cfg


def _beta_spec(text: str, key: str) -> str:
    low = text.strip().lower()
    if low in ("full", "adaptive"):
        return low
    v = _int(low, key)
    if v < 0:
        raise ConfigError(f"{key}: must be >= 0")
    return str(v)

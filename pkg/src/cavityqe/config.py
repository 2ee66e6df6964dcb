"""Run configuration: flat key=value files merged with CLI overrides.

File syntax: one ``key = value`` pair per line, ``#`` starts a comment,
blank lines are skipped.  Keys are the snake_case names below; anything
else is rejected so typos cannot silently fall back to defaults.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .params import ValidationError

_FORMATS = ("csv", "json", "text")
_ROUTES = ("analytic", "numeric")


@dataclass
class RunConfig:
    """Every knob the command line understands, file- or flag-settable.

    Frequencies are linear GHz, times ns.  ``None`` means "not provided";
    each command decides which keys it requires and what it defaults.
    """

    g0_ghz: float | None = None
    kappa_ghz: float | None = None
    gamma_ghz: float | None = None
    delta_ghz: float = 0.0
    gamma0_ghz: float | None = None
    t_max_ns: float | None = None
    dt_ns: float | None = None
    tail_extension: float | None = 5.0
    axis: str | None = None
    values: tuple[float, ...] | None = None
    route: str = "analytic"
    bracket_lo_ghz: float = 0.1
    bracket_hi_ghz: float = 100.0
    span_ghz: float | None = None
    points: int = 2001
    workers: int | None = None
    with_analytic_ref: bool = False
    out: str | None = None
    format: str | None = None


def _parse_float(key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ValidationError(key, f"expected a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ValidationError(key, f"must be finite, got {raw!r}")
    return value


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(key, f"expected an integer, got {raw!r}") from None


def _parse_bool(key: str, raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "on", "1"):
        return True
    if lowered in ("false", "no", "off", "0"):
        return False
    raise ValidationError(key, f"expected a boolean, got {raw!r}")


def _parse_values(key: str, raw: str) -> tuple[float, ...]:
    parts = [part.strip() for part in raw.split(",")]
    return tuple(_parse_float(key, part) for part in parts if part)


def _parse_choice(choices):
    def parse(key: str, raw: str) -> str:
        value = raw.strip().lower()
        if value not in choices:
            raise ValidationError(key, f"expected one of {choices}, got {raw!r}")
        return value

    return parse


def _parse_tail(key: str, raw: str):
    if raw.strip().lower() in ("none", "off"):
        return None
    value = _parse_float(key, raw)
    if value <= 0.0:
        raise ValidationError(key, f"must be positive or 'none', got {raw!r}")
    return value


def _parse_str(key: str, raw: str) -> str:
    return raw


_PARSERS = {
    "g0_ghz": _parse_float,
    "kappa_ghz": _parse_float,
    "gamma_ghz": _parse_float,
    "delta_ghz": _parse_float,
    "gamma0_ghz": _parse_float,
    "t_max_ns": _parse_float,
    "dt_ns": _parse_float,
    "tail_extension": _parse_tail,
    "axis": _parse_str,
    "values": _parse_values,
    "route": _parse_choice(_ROUTES),
    "bracket_lo_ghz": _parse_float,
    "bracket_hi_ghz": _parse_float,
    "span_ghz": _parse_float,
    "points": _parse_int,
    "workers": _parse_int,
    "with_analytic_ref": _parse_bool,
    "out": _parse_str,
    "format": _parse_choice(_FORMATS),
}


def read_config_file(path: str) -> dict[str, str]:
    """Read a flat key=value file into a string mapping.

    Raises :class:`ValidationError` on malformed lines or duplicate keys
    and lets I/O failures (missing file, permissions) propagate as OSError.
    """
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or not key:
                raise ValidationError(
                    f"{path}:{line_no}", f"expected 'key = value', got {raw.rstrip()!r}"
                )
            if key in mapping:
                raise ValidationError(key, f"duplicate key at {path}:{line_no}")
            mapping[key] = value.strip()
    return mapping


def build_run_config(
    file_map: dict[str, str] | None, overrides: dict[str, object] | None = None
) -> RunConfig:
    """Typed RunConfig from a parsed file plus already-typed CLI overrides.

    Unknown keys are rejected; override entries that are None (flag not
    passed) leave the file/default value in place.
    """
    cfg = RunConfig()
    for key, raw in (file_map or {}).items():
        parser = _PARSERS.get(key)
        if parser is None:
            raise ValidationError(key, "unknown configuration key")
        setattr(cfg, key, parser(key, raw))
    known = {f.name for f in fields(RunConfig)}
    for key, value in (overrides or {}).items():
        if key not in known:
            raise ValidationError(key, "unknown configuration key")
        if value is not None:
            setattr(cfg, key, value)
    return cfg


def meta_dict(cfg: RunConfig) -> dict:
    """JSON-ready view of the resolved configuration (Nones dropped)."""
    out = {}
    for f in fields(RunConfig):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if isinstance(value, tuple):
            value = list(value)
        out[f.name] = value
    return out

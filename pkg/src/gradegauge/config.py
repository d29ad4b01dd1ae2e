"""Application configuration: a flat key=value file plus GG_-prefixed
environment overrides.

Recognized keys (file form, lower-case): merit_cutoff, distinction_cutoff,
first_class_cutoff, min_leaf_size, prune, confidence_factor, store_path,
host, port, log_level, max_upload_bytes, session_ttl_seconds. Environment
variables use the upper-cased key with a GG_ prefix (GG_STORE_PATH, ...)
and win over the file.
"""

from __future__ import annotations

import os
from collections.abc import Mapping
from dataclasses import dataclass

from .errors import ConfigError
from .induction import TrainConfig
from .preprocess import Thresholds


@dataclass(frozen=True)
class AppConfig:
    thresholds: Thresholds = Thresholds()
    train: TrainConfig = TrainConfig()
    store_path: str = "gradegauge.db"
    host: str = "127.0.0.1"
    port: int = 8000
    log_level: str = "info"
    max_upload_bytes: int = 1_048_576
    session_ttl_seconds: float = 86400.0


def _parse_bool(raw: str, key: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}")


def _parse_number(raw: str, key: str, cast):
    try:
        return cast(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: {raw!r} is not a number") from exc


def parse_config_text(text: str) -> dict[str, str]:
    """key=value per line; blank lines and #-comments ignored."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


_KEYS = ("merit_cutoff", "distinction_cutoff", "first_class_cutoff",
         "min_leaf_size", "prune", "confidence_factor", "store_path",
         "host", "port", "log_level", "max_upload_bytes",
         "session_ttl_seconds")


def load_config(path: str | None = None,
                env: Mapping[str, str] = os.environ) -> AppConfig:
    """Defaults, overlaid by the file at ``path`` (when given), overlaid by
    GG_* environment variables."""
    values: dict[str, str] = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                values.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for key in values:
        if key not in _KEYS:
            raise ConfigError(f"unknown configuration key {key!r}")
    for key in _KEYS:
        override = env.get(f"GG_{key.upper()}")
        if override is not None:
            values[key] = override

    base = AppConfig()
    try:
        thresholds = Thresholds(
            _parse_number(values["merit_cutoff"], "merit_cutoff", float)
            if "merit_cutoff" in values else base.thresholds.merit_cutoff,
            _parse_number(values["distinction_cutoff"], "distinction_cutoff",
                          float)
            if "distinction_cutoff" in values
            else base.thresholds.distinction_cutoff,
            _parse_number(values["first_class_cutoff"], "first_class_cutoff",
                          float)
            if "first_class_cutoff" in values
            else base.thresholds.first_class_cutoff,
        )
        train = TrainConfig(
            _parse_number(values["min_leaf_size"], "min_leaf_size", int)
            if "min_leaf_size" in values else None,
            _parse_bool(values["prune"], "prune")
            if "prune" in values else None,
            _parse_number(values["confidence_factor"], "confidence_factor",
                          float)
            if "confidence_factor" in values
            else base.train.confidence_factor,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    return AppConfig(
        thresholds=thresholds,
        train=train,
        store_path=values.get("store_path", base.store_path),
        host=values.get("host", base.host),
        port=_parse_number(values["port"], "port", int)
        if "port" in values else base.port,
        log_level=values.get("log_level", base.log_level),
        max_upload_bytes=_parse_number(values["max_upload_bytes"],
                                       "max_upload_bytes", int)
        if "max_upload_bytes" in values else base.max_upload_bytes,
        session_ttl_seconds=_parse_number(values["session_ttl_seconds"],
                                          "session_ttl_seconds", float)
        if "session_ttl_seconds" in values else base.session_ttl_seconds,
    )

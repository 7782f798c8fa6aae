"""TOML config access shared by the scenario, learning, power-game and experiment loaders."""

from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, MissingFieldError

_MISSING = object()


def parse_toml(text: str) -> dict[str, Any]:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc


def read_config(path: str | Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_toml(text)


def shipped_config(name: str) -> str:
    """Text of a config file bundled under ``stackjam/data``."""
    return resources.files("stackjam").joinpath("data").joinpath(name).read_text()


def section(doc: Mapping[str, Any], name: str, required: bool = True) -> Mapping[str, Any]:
    sec = doc.get(name)
    if sec is None:
        if required:
            raise MissingFieldError(name, "*")
        return {}
    if not isinstance(sec, Mapping):
        raise ConfigError(f"[{name}] must be a table")
    return sec


def field(sec: Mapping[str, Any], section_name: str, key: str, default: Any = _MISSING) -> Any:
    if key in sec:
        return sec[key]
    if default is _MISSING:
        raise MissingFieldError(section_name, key)
    return default

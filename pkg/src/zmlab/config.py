"""Run configuration from a flat ``name = value`` text file.

Recognised keys::

    c_thm1_loglog = 1.0       # any BoundConstants field
    tol.identity = 1e-6       # tolerances, prefixed with "tol."
    cache_path = zeros.csv
    output_format = json      # json | csv | table

Blank lines and ``#`` comments are ignored. The ``ZMLAB_CONFIG``
environment variable names the file when no path is passed explicitly.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from .bounds import BoundConstants

ENV_VAR = "ZMLAB_CONFIG"


class ConfigError(ValueError):
    """Malformed configuration text."""


class OutputFormat(str, enum.Enum):
    JSON = "json"
    CSV = "csv"
    TABLE = "table"


DEFAULT_TOLERANCES = {
    "identity": 1e-6,
    "winding": 0.01,
    "jensen": 1e-12,
    "moment": 1e-9,
}


@dataclass
class RunConfig:
    constants: BoundConstants = field(default_factory=BoundConstants)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    cache_path: str | None = None
    output_format: OutputFormat | None = None

    def __post_init__(self):
        for name, value in self.tolerances.items():
            if not value > 0:
                raise ConfigError(f"tolerance {name} must be positive")


_CONSTANT_NAMES = {f.name for f in fields(BoundConstants)}


def parse_config(text: str) -> RunConfig:
    consts, tols = {}, dict(DEFAULT_TOLERANCES)
    cache_path = fmt = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'name = value'")
        name, value = (p.strip() for p in line.split("=", 1))
        try:
            if name in _CONSTANT_NAMES:
                consts[name] = float(value)
            elif name.startswith("tol."):
                tols[name[4:]] = float(value)
            elif name == "cache_path":
                cache_path = value
            elif name == "output_format":
                fmt = OutputFormat(value.lower())
            else:
                raise ConfigError(f"line {lineno}: unknown key '{name}'")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for '{name}': {value}") from exc
    try:
        constants = BoundConstants(**consts)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(constants, tols, cache_path, fmt)


def load_config(path: str | Path | None = None) -> RunConfig:
    """Read ``path``, else $ZMLAB_CONFIG, else return defaults."""
    path = path or os.environ.get(ENV_VAR)
    if not path:
        return RunConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(text)

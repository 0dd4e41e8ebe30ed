"""Tool configuration: defaults overridable from a TOML file and the command line."""

from __future__ import annotations

import copy
import sys
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ProdbgError

DEFAULTS = {
    "limits": {"steps": 100_000, "depth": 5_000, "timeout_ms": 2_000},
    "fl": {"method": "sbfl", "formula": "ochiai", "include_errors": False, "mutant_budget": 500},
    "repair": {"max_k": 2, "top_n": 3, "budget": 5_000, "time_budget_ms": 60_000,
               "extra_body_roots": 1, "max_added": 4},
    "pipeline": {"time_budget_ms": 600_000, "seed": 0, "zero_timing": False},
    "report": {"sections": ["tests", "fl", "repair_hint", "metrics"], "top": 3},
    "llm": {"base_url": "http://localhost:8000/v1", "model": "default", "n": 1,
            "temperature": 0.7, "timeout": 60.0, "description": "", "reference": ""},
}


class ConfigError(ProdbgError):
    pass


def merge(base: dict, override: dict, where: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in out:
            raise ConfigError(f"unknown config key {where}{key}")
        if isinstance(out[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{where}{key} must be a table")
            out[key] = merge(out[key], value, f"{where}{key}.")
        else:
            out[key] = value
    return out


def load_config(path=None, overrides: dict | None = None) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            with open(Path(path), "rb") as fh:
                cfg = merge(cfg, tomllib.load(fh))
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"bad config {path}: {e}") from e
    if overrides:
        cfg = merge(cfg, overrides)
    return cfg


def dump_defaults() -> str:
    """The default configuration as TOML text."""
    lines = []
    for table, values in DEFAULTS.items():
        lines.append(f"[{table}]")
        for key, value in values.items():
            lines.append(f"{key} = {_toml_value(value)}")
        lines.append("")
    return "\n".join(lines)


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, list):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    if isinstance(v, int):
        return f"{v}"
    return repr(v)

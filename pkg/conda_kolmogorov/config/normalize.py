"""Turn a raw TOML mapping into a validated RunConfig.

Keys are kebab-case in files and snake_case on the dataclasses; both
spellings are accepted.  Every unknown key is an error that names its
dotted location.
"""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING

from ..exceptions import ConfigError, ConfigKeyError, DomainError
from ..models import (
    DriftConfig,
    FdConfig,
    Grid2D,
    McConfig,
    PropagateConfig,
    RateConfig,
    RunConfig,
    Table1Config,
    fd_grid_for,
)

if TYPE_CHECKING:
    from typing import Any

SCHEMA_VERSION = 1

_TOP_LEVEL = (
    "schema-version",
    "scenario",
    "output",
    "drift",
    "initial-condition",
    "grid",
    "propagate",
    "mc",
    "fd",
    "table1",
    "rate",
)


def to_kebab(name: str) -> str:
    """``n_samples`` -> ``n-samples``; ``T`` -> ``t``."""
    return name.lower().replace("_", "-")


def _key_map(cls: type) -> dict[str, str]:
    """Accepted spellings for every field of dataclass *cls*."""
    names: dict[str, str] = {}
    for f in dataclasses.fields(cls):
        names[to_kebab(f.name)] = f.name
        names[f.name] = f.name
    return names


def _check_table(raw: object, location: str) -> dict[str, Any]:
    if not isinstance(raw, dict):
        raise ConfigError(location, f"must be a table, got {type(raw).__name__}")
    return raw


def _coerce(value: Any) -> Any:
    if isinstance(value, list):
        return tuple(value)
    return value


def _build(cls: type, raw: object, location: str, **extra: Any) -> Any:
    """Instantiate *cls* from *raw*, reporting problems at *location*."""
    table = _check_table(raw, location)
    names = _key_map(cls)
    unknown = [k for k in table if k not in names]
    if unknown:
        allowed = [
            to_kebab(f.name) for f in dataclasses.fields(cls) if f.name not in extra
        ]
        raise ConfigKeyError(location, [f"{location}.{k}" for k in unknown], allowed)
    kwargs = {names[k]: _coerce(v) for k, v in table.items()}
    kwargs.update(extra)
    try:
        return cls(**kwargs)
    except DomainError as exc:
        raise ConfigError(location, str(exc)) from exc
    except TypeError as exc:
        raise ConfigError(location, str(exc)) from exc


def _fd_config(raw: object, grid: Grid2D) -> FdConfig:
    table = dict(_check_table(raw, "fd"))
    if "grid" in table:
        fd_grid = _build(Grid2D, table.pop("grid"), "fd.grid")
    else:
        fd_grid = fd_grid_for(grid)
    return _build(FdConfig, table, "fd", grid=fd_grid)


def normalize_run_config(raw: dict[str, Any]) -> RunConfig:
    """Validate *raw* (plain dicts and lists) and build a :class:`RunConfig`.

    Missing sections take their defaults.  ``[fd.grid]`` defaults to the
    propagation grid refined once in both directions.
    """
    unknown = [k for k in raw if k not in _TOP_LEVEL]
    if unknown:
        raise ConfigKeyError("<root>", unknown, _TOP_LEVEL)

    version = raw.get("schema-version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            "schema-version",
            f"unsupported version {version!r}; expected {SCHEMA_VERSION}",
        )

    defaults = RunConfig()
    scenario = raw.get("scenario", defaults.scenario)
    output = raw.get("output", defaults.output)
    for key, value in (("scenario", scenario), ("output", output)):
        if not isinstance(value, str) or not value:
            raise ConfigError(key, "must be a non-empty string")

    drift = _build(DriftConfig, raw.get("drift", {}), "drift")
    if drift.coefficients is not None and "preset" not in raw.get("drift", {}):
        drift = dataclasses.replace(drift, preset=None)
    elif drift.coefficients is not None:
        raise ConfigError("drift", "give either 'preset' or 'coefficients', not both")

    ic = _check_table(raw.get("initial-condition", {}), "initial-condition")
    unknown_ic = [k for k in ic if k not in ("sigma-c2", "sigma_c2")]
    if unknown_ic:
        located = [f"initial-condition.{k}" for k in unknown_ic]
        raise ConfigKeyError("initial-condition", located, ["sigma-c2"])
    sigma_c2 = ic.get("sigma-c2", ic.get("sigma_c2", defaults.sigma_c2))
    if not isinstance(sigma_c2, (int, float)) or not sigma_c2 > 0:
        raise ConfigError("initial-condition.sigma-c2", "must be a positive number")

    grid = _build(Grid2D, raw["grid"], "grid") if "grid" in raw else defaults.grid
    fd = _fd_config(raw.get("fd", {}), grid)

    return RunConfig(
        schema_version=version,
        scenario=scenario,
        output=output,
        drift=drift,
        sigma_c2=float(sigma_c2),
        grid=grid,
        propagate=_build(PropagateConfig, raw.get("propagate", {}), "propagate"),
        mc=_build(McConfig, raw.get("mc", {}), "mc"),
        fd=fd,
        table1=_build(Table1Config, raw.get("table1", {}), "table1"),
        rate=_build(RateConfig, raw.get("rate", {}), "rate"),
    )

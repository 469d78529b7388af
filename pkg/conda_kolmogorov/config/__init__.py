"""Run-configuration parser registry and auto-detection."""

from __future__ import annotations

from pathlib import Path

from ..exceptions import ConfigError, ConfigFileNotFoundError
from ..models import RunConfig
from .base import RunConfigParser
from .normalize import SCHEMA_VERSION, normalize_run_config
from .pyproject_toml import PyprojectTomlParser
from .toml import KolmogorovTomlParser, run_config_to_toml

__all__ = [
    "SCHEMA_VERSION",
    "RunConfigParser",
    "detect_and_load",
    "detect_config_file",
    "get_parser",
    "normalize_run_config",
    "run_config_to_toml",
]

_SEARCH_ORDER: tuple[str, ...] = (
    "kolmogorov.toml",
    "pyproject.toml",
)


def _parser_registry() -> list[RunConfigParser]:
    """Return all registered parser instances in detection priority order."""
    return [
        PyprojectTomlParser(),
        KolmogorovTomlParser(),
    ]


def get_parser(path: Path) -> RunConfigParser | None:
    """Return the first parser that can handle *path*, or ``None``."""
    for parser in _parser_registry():
        if parser.can_handle(path):
            return parser
    return None


def detect_config_file(start_dir: Path | None = None) -> Path | None:
    """Walk up from *start_dir* looking for a run configuration file.

    A ``pyproject.toml`` only counts when it has a ``[tool.conda-kolmogorov]``
    table.  Returns ``None`` when nothing is found.
    """
    if start_dir is None:
        start_dir = Path.cwd()
    current = start_dir.resolve()
    while True:
        for name in _SEARCH_ORDER:
            candidate = current / name
            if candidate.is_file() and get_parser(candidate) is not None:
                return candidate
        parent = current.parent
        if parent == current:
            break
        current = parent
    return None


def detect_and_load(
    file_path: Path | None = None,
    start_dir: Path | None = None,
) -> tuple[Path | None, RunConfig]:
    """Load *file_path*, or the detected configuration, or the defaults.

    Returns ``(resolved_path_or_None, config)``.  An explicit *file_path*
    that does not exist raises ``ConfigFileNotFoundError``.
    """
    if file_path is not None:
        path = file_path.resolve()
        if not path.is_file():
            raise ConfigFileNotFoundError(str(path))
    else:
        path = detect_config_file(start_dir)
        if path is None:
            return None, RunConfig()
    parser = get_parser(path)
    if parser is None:
        raise ConfigError(
            str(path), "no [tool.conda-kolmogorov] table or not a .toml file"
        )
    return path, parser.parse(path)

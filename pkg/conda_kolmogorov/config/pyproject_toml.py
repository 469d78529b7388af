"""Parser for run configuration embedded in ``pyproject.toml``.

Reads the ``[tool.conda-kolmogorov]`` table, which has the same layout as a
``kolmogorov.toml`` document.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from .base import RunConfigParser
from .normalize import normalize_run_config
from .toml import load_toml

if TYPE_CHECKING:
    from pathlib import Path
    from typing import ClassVar

    from ..models import RunConfig

TOOL_TABLE = "conda-kolmogorov"


class PyprojectTomlParser(RunConfigParser):
    """Reads run configuration from ``pyproject.toml``."""

    extensions: ClassVar[tuple[str, ...]] = (".toml",)
    filenames: ClassVar[tuple[str, ...]] = ("pyproject.toml",)

    def can_handle(self, path: Path) -> bool:
        """Return True if *path* is a pyproject.toml with our tool table."""
        if path.name not in self.filenames:
            return False
        try:
            data = load_toml(path)
        except Exception:
            return False
        return isinstance(data.get("tool", {}).get(TOOL_TABLE), dict)

    def parse(self, path: Path) -> RunConfig:
        return normalize_run_config(load_toml(path)["tool"][TOOL_TABLE])

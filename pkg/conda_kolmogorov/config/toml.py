"""Parser for standalone ``kolmogorov.toml`` run files.

.. code-block:: toml

    schema-version = 1
    scenario = "table1"
    output = "results/{{ scenario }}-{{ seed }}"

    [drift]
    preset = "table1"

    [propagate]
    n = 5
    kernel-mode = "pbar"
"""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING

import tomlkit

from ..exceptions import ConfigError
from .base import RunConfigParser
from .normalize import normalize_run_config, to_kebab

if TYPE_CHECKING:
    from pathlib import Path
    from typing import Any, ClassVar

    from tomlkit.items import Table

    from ..models import RunConfig


def _section(obj: Any, skip: tuple[str, ...] = ()) -> Table:
    table = tomlkit.table()
    for f in dataclasses.fields(obj):
        if f.name in skip:
            continue
        value = getattr(obj, f.name)
        if value is None:
            continue
        if isinstance(value, tuple):
            value = list(value)
        table.add(to_kebab(f.name), value)
    return table


def run_config_to_toml(config: RunConfig) -> str:
    """Serialize *config* so that parsing it back yields an equal config."""
    doc = tomlkit.document()
    doc.add("schema-version", config.schema_version)
    doc.add("scenario", config.scenario)
    doc.add("output", config.output)
    doc.add("drift", _section(config.drift))
    ic = tomlkit.table()
    ic.add("sigma-c2", config.sigma_c2)
    doc.add("initial-condition", ic)
    doc.add("grid", _section(config.grid))
    doc.add("propagate", _section(config.propagate))
    doc.add("mc", _section(config.mc))
    fd = _section(config.fd, skip=("grid",))
    fd.add("grid", _section(config.fd.grid))
    doc.add("fd", fd)
    doc.add("table1", _section(config.table1))
    doc.add("rate", _section(config.rate))
    return tomlkit.dumps(doc)


def load_toml(path: Path) -> dict[str, Any]:
    """Read *path* into plain Python containers."""
    try:
        return tomlkit.loads(path.read_text(encoding="utf-8")).unwrap()
    except Exception as exc:
        raise ConfigError(str(path), str(exc)) from exc


class KolmogorovTomlParser(RunConfigParser):
    """Reads ``kolmogorov.toml`` or any other explicitly named ``.toml`` run file."""

    extensions: ClassVar[tuple[str, ...]] = (".toml",)
    filenames: ClassVar[tuple[str, ...]] = ("kolmogorov.toml",)

    def can_handle(self, path: Path) -> bool:
        """Return True for ``.toml`` files other than ``pyproject.toml``."""
        return path.suffix in self.extensions and path.name != "pyproject.toml"

    def parse(self, path: Path) -> RunConfig:
        return normalize_run_config(load_toml(path))

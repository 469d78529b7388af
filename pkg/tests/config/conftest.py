"""Fixtures for configuration tests."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

if TYPE_CHECKING:
    from pathlib import Path


@pytest.fixture
def sample_pyproject(tmp_project: Path) -> Path:
    """A pyproject.toml carrying a ``[tool.conda-kolmogorov]`` table."""
    content = """\
[project]
name = "example"

[tool.conda-kolmogorov]
scenario = "from-pyproject"

[tool.conda-kolmogorov.propagate]
n = 3
kernel-mode = "q"
"""
    path = tmp_project / "pyproject.toml"
    path.write_text(content)
    return path


@pytest.fixture
def plain_pyproject(tmp_project: Path) -> Path:
    """A pyproject.toml without a conda-kolmogorov table."""
    path = tmp_project / "pyproject.toml"
    path.write_text('[project]\nname = "example"\n')
    return path

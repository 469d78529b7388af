"""Shared fixtures for conda-kolmogorov tests."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from conda_kolmogorov import parallel
from conda_kolmogorov.drift import affine, table1
from conda_kolmogorov.models import Grid2D, McConfig

if TYPE_CHECKING:
    from pathlib import Path

    from conda_kolmogorov.drift import DriftSpec

@pytest.fixture(autouse=True)
def isolated(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Run every test from an empty directory with a private reference cache."""
    cache_root = tmp_path / "cache"
    monkeypatch.setattr("conda_kolmogorov.cache._cache_root", lambda: cache_root)
    project = tmp_path / "project"
    project.mkdir()
    monkeypatch.chdir(project)
    yield project
    parallel.set_max_workers(None)


@pytest.fixture
def tmp_project(isolated: Path) -> Path:
    """A temporary directory acting as a project root."""
    return isolated


@pytest.fixture
def small_grid() -> Grid2D:
    return Grid2D(-4.0, 4.0, -3.0, 3.0, 41, 31)


@pytest.fixture
def table1_drift() -> DriftSpec:
    return table1()


@pytest.fixture
def affine_drift() -> DriftSpec:
    return affine([-1.0])


@pytest.fixture
def small_mc() -> McConfig:
    return McConfig(
        n_steps=100, n_samples=20_000, seed=7, batch_size=4096, bridge_steps=128
    )


@pytest.fixture
def sample_config(tmp_project: Path) -> Path:
    """A small ``kolmogorov.toml`` whose commands finish in seconds."""
    content = """\
schema-version = 1
scenario = "small"
output = "out/{{ scenario }}-{{ seed }}"

[drift]
preset = "affine"

[initial-condition]
sigma-c2 = 0.5

[grid]
x-min = -6.0
x-max = 6.0
y-min = -4.0
y-max = 4.0
nx = 49
ny = 33

[propagate]
T = 0.5
N = 2

[mc]
n-steps = 50
n-samples = 4000
seed = 3

[fd]
n-t = 40

[table1]
iterations = [1, 2]
line-cut-y = 0.5
line-cut-stride = 12

[rate]
times = [0.2, 0.1]
y = 1.0
reference = "mc"
"""
    path = tmp_project / "kolmogorov.toml"
    path.write_text(content)
    return path

"""Tests for conda_kolmogorov.cache."""

from __future__ import annotations

import json

import numpy as np
import pytest

from conda_kolmogorov import __version__, cache
from conda_kolmogorov.cache import (
    _key,
    fd_fingerprint,
    has_field,
    load_field,
    save_field,
)
from conda_kolmogorov.drift import affine, table1
from conda_kolmogorov.models import FdConfig, Field


@pytest.fixture
def fingerprint(small_grid):
    return fd_fingerprint(table1(), FdConfig(grid=small_grid, T=0.5, n_t=10), 0.2)


def test_fingerprint_contents(fingerprint, small_grid):
    assert fingerprint["drift"] == "polynomial[0.0, 1.5, -0.125]"
    assert fingerprint["sigma_c2"] == 0.2
    assert fingerprint["grid"]["nx"] == small_grid.nx
    assert "grid" not in fingerprint["fd"]
    assert fingerprint["fd"]["x_scheme"] == "spectral"
    assert fingerprint["version"] == __version__


@pytest.mark.parametrize(
    "change",
    [
        lambda g: fd_fingerprint(affine([-1.0]), FdConfig(grid=g, T=0.5, n_t=10), 0.2),
        lambda g: fd_fingerprint(table1(), FdConfig(grid=g, T=0.5, n_t=20), 0.2),
        lambda g: fd_fingerprint(table1(), FdConfig(grid=g, T=0.5, n_t=10), 0.3),
        lambda g: fd_fingerprint(
            table1(), FdConfig(grid=g.refined(), T=0.5, n_t=10), 0.2
        ),
    ],
    ids=["drift", "n_t", "sigma", "grid"],
)
def test_key_depends_on_every_input(fingerprint, small_grid, change):
    assert _key(change(small_grid)) != _key(fingerprint)


def test_miss_then_hit(fingerprint, small_grid):
    assert not has_field(fingerprint)
    assert load_field(fingerprint) is None
    field = Field(small_grid, np.random.default_rng(1).random(small_grid.shape))
    path = save_field(fingerprint, field)
    assert path.suffix == ".npz"
    assert path.parent == cache._cache_root() / "fd"
    assert has_field(fingerprint)
    cached = load_field(fingerprint)
    assert cached is not None
    assert cached.grid == small_grid
    np.testing.assert_array_equal(cached.values, field.values)


def test_tampered_fingerprint_misses(fingerprint, small_grid):
    save_field(fingerprint, Field(small_grid, np.zeros(small_grid.shape)))
    meta = cache._cache_root() / "fd" / f"{_key(fingerprint)}.json"
    stored = json.loads(meta.read_text())
    stored["sigma_c2"] = 99.0
    meta.write_text(json.dumps(stored))
    assert has_field(fingerprint)
    assert load_field(fingerprint) is None


def test_corrupt_metadata_misses(fingerprint, small_grid):
    save_field(fingerprint, Field(small_grid, np.zeros(small_grid.shape)))
    (cache._cache_root() / "fd" / f"{_key(fingerprint)}.json").write_text("{not json")
    assert load_field(fingerprint) is None


def test_corrupt_archive_misses(fingerprint, small_grid):
    save_field(fingerprint, Field(small_grid, np.zeros(small_grid.shape)))
    (cache._cache_root() / "fd" / f"{_key(fingerprint)}.npz").write_bytes(b"garbage")
    assert load_field(fingerprint) is None

"""Tests for conda_kolmogorov.models."""

from __future__ import annotations

import math

import numpy as np
import pytest

from conda_kolmogorov.drift import photon, table1
from conda_kolmogorov.exceptions import DomainError, ShapeError
from conda_kolmogorov.models import (
    DriftConfig,
    FdConfig,
    Field,
    Grid2D,
    McConfig,
    McEstimate,
    PropagateConfig,
    RateConfig,
    RunConfig,
    Table1Config,
    fd_grid_for,
)


def test_grid_spacing_and_nodes(small_grid):
    assert small_grid.dx == pytest.approx(0.2)
    assert small_grid.dy == pytest.approx(0.2)
    assert small_grid.x[0] == -4.0
    assert small_grid.x[-1] == 4.0
    assert small_grid.shape == (41, 31)


@pytest.mark.parametrize(
    "args",
    [
        (-1.0, 1.0, -1.0, 1.0, 2, 5),
        (-1.0, 1.0, -1.0, 1.0, 5, 2),
        (1.0, -1.0, -1.0, 1.0, 5, 5),
        (-1.0, 1.0, 1.0, 1.0, 5, 5),
    ],
    ids=["few-x", "few-y", "reversed-x", "empty-y"],
)
def test_grid_validation(args):
    with pytest.raises(DomainError):
        Grid2D(*args)


def test_grid_refined_keeps_nodes(small_grid):
    fine = small_grid.refined()
    assert fine.shape == (81, 61)
    np.testing.assert_allclose(fine.x[::2], small_grid.x)
    np.testing.assert_allclose(fine.y[::2], small_grid.y)


def test_fd_grid_refines_y_twice(small_grid):
    fine = fd_grid_for(small_grid)
    assert fine.shape == (81, 121)
    np.testing.assert_allclose(fine.y[::4], small_grid.y)
    assert small_grid.refined_y().shape == (41, 61)


def test_meshgrid_is_ij(small_grid):
    xx, yy = small_grid.meshgrid()
    assert xx.shape == small_grid.shape
    assert xx[3, 0] == small_grid.x[3]
    assert yy[0, 5] == small_grid.y[5]


def test_field_mass_of_constant(small_grid):
    field = Field(small_grid, np.ones(small_grid.shape))
    assert field.mass() == pytest.approx(8.0 * 6.0)


def test_field_shape_mismatch(small_grid):
    with pytest.raises(ShapeError):
        Field(small_grid, np.ones((3, 3)))


def test_field_rejects_non_finite(small_grid):
    values = np.zeros(small_grid.shape)
    values[1, 1] = np.nan
    with pytest.raises(DomainError, match="finite"):
        Field(small_grid, values)


def test_restrict_to(small_grid):
    fine = small_grid.refined()
    xx, yy = fine.meshgrid()
    restricted = Field(fine, xx + 10 * yy).restrict_to(small_grid)
    cx, cy = small_grid.meshgrid()
    assert restricted.grid == small_grid
    np.testing.assert_allclose(restricted.values, cx + 10 * cy)


def test_restrict_to_requires_nesting(small_grid):
    other = Grid2D(-4.0, 4.5, -3.0, 3.0, 41, 31)
    with pytest.raises(ShapeError):
        Field(small_grid, np.zeros(small_grid.shape)).restrict_to(other)


def test_cut_at_y_interpolates(small_grid):
    _, yy = small_grid.meshgrid()
    field = Field(small_grid, 2 * yy)
    np.testing.assert_allclose(field.cut_at_y(0.25), np.full(small_grid.nx, 0.5))


def test_cut_at_y_outside(small_grid):
    with pytest.raises(DomainError, match="line cut"):
        Field(small_grid, np.zeros(small_grid.shape)).cut_at_y(3.5)


def test_propagate_config_dt():
    assert PropagateConfig(T=2.5, N=5).dt == pytest.approx(0.5)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"T": 0.0},
        {"N": 0},
        {"kernel_mode": "exact"},
        {"quadrature": "simpson"},
        {"support_cutoff_sigmas": 0.0},
    ],
    ids=["time", "steps", "mode", "quadrature", "cutoff"],
)
def test_propagate_config_validation(kwargs):
    with pytest.raises(DomainError):
        PropagateConfig(**kwargs)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_steps": 0},
        {"n_samples": 0},
        {"batch_size": 0},
        {"seed": -1},
        {"seed": 2**64},
    ],
    ids=["steps", "samples", "batch", "negative-seed", "wide-seed"],
)
def test_mc_config_validation(kwargs):
    with pytest.raises(DomainError):
        McConfig(**kwargs)


@pytest.mark.parametrize(
    ("estimate", "value", "expected"),
    [
        (McEstimate(1.0, 0.5, 100), 2.0, 2.0),
        (McEstimate(1.0 + 1.0j, 1.0, 100), 1.0, 1.0),
        (McEstimate(1.0, 0.0, 100), 1.0, 0.0),
        (McEstimate(1.0, 0.0, 100), 2.0, math.inf),
    ],
    ids=["real", "complex", "exact", "zero-error"],
)
def test_estimate_deviation(estimate, value, expected):
    assert estimate.deviation(value) == expected


def test_fd_config_validation(small_grid):
    with pytest.raises(DomainError):
        FdConfig(grid=small_grid, x_scheme="weno")
    with pytest.raises(DomainError):
        FdConfig(grid=small_grid, n_t=0)
    assert FdConfig(grid=small_grid, T=1.0, n_t=4).dt == pytest.approx(0.25)


def test_table1_config_validation():
    with pytest.raises(DomainError):
        Table1Config(iterations=())
    with pytest.raises(DomainError):
        Table1Config(iterations=(0, 5))
    with pytest.raises(DomainError):
        Table1Config(line_cut_stride=0)


def test_rate_config_validation():
    with pytest.raises(DomainError):
        RateConfig(times=(0.1,))
    with pytest.raises(DomainError):
        RateConfig(times=(0.1, 0.0))
    with pytest.raises(DomainError):
        RateConfig(reference="fd")


def test_run_config_defaults():
    config = RunConfig()
    assert config.scenario == "table1"
    assert config.sigma_c2 == 0.2
    assert config.propagate.T == 2.5
    assert config.table1.iterations == (1, 5)
    assert (config.fd.grid.nx, config.fd.grid.ny) == (561, 401)
    assert config.drift_spec.signature == table1().signature


def test_run_config_drift_spec():
    config = RunConfig(drift=DriftConfig(preset="photon"))
    assert config.drift_spec.signature == photon().signature

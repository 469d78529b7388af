"""Tests for conda_kolmogorov.metrics."""

from __future__ import annotations

import math

import numpy as np
import pytest

from conda_kolmogorov.exceptions import (
    DegenerateReferenceError,
    DomainError,
    ShapeError,
)
from conda_kolmogorov.metrics import error_report, lp_norm, relative_lp_error
from conda_kolmogorov.models import Field, Grid2D


@pytest.fixture
def unit_grid():
    return Grid2D(0.0, 1.0, 0.0, 1.0, 11, 11)


@pytest.mark.parametrize(
    ("p", "expected"),
    [(1, 242.0), (2, 22.0), ("inf", 2.0), (math.inf, 2.0)],
    ids=["l1", "l2", "linf", "math-inf"],
)
def test_constant_field_norms(unit_grid, p, expected):
    field = Field(unit_grid, np.full(unit_grid.shape, -2.0))
    assert lp_norm(field, p) == pytest.approx(expected)


def test_unknown_norm(unit_grid):
    with pytest.raises(DomainError):
        lp_norm(Field(unit_grid, np.ones(unit_grid.shape)), 3)


def test_relative_error_scales(unit_grid):
    reference = Field(unit_grid, np.ones(unit_grid.shape))
    approx = Field(unit_grid, np.full(unit_grid.shape, 1.1))
    for p in (1, 2, "inf"):
        assert relative_lp_error(reference, approx, p) == pytest.approx(0.1)
    assert relative_lp_error(reference, reference, 2) == 0.0


def test_relative_error_grid_mismatch(unit_grid):
    other = Grid2D(0.0, 1.0, 0.0, 1.0, 21, 11)
    with pytest.raises(ShapeError):
        relative_lp_error(
            Field(other, np.ones(other.shape)),
            Field(unit_grid, np.ones(unit_grid.shape)),
            2,
        )


def test_zero_reference(unit_grid):
    zero = Field(unit_grid, np.zeros(unit_grid.shape))
    with pytest.raises(DegenerateReferenceError):
        relative_lp_error(zero, Field(unit_grid, np.ones(unit_grid.shape)), 1)


def test_error_report(unit_grid):
    xx, _ = unit_grid.meshgrid()
    reference = Field(unit_grid, 1.0 + xx)
    approx = Field(unit_grid, 1.0 + xx + 0.01)
    report = error_report(approx, reference, "demo", 3, "fd")
    assert report.scenario == "demo"
    assert report.n_iterations == 3
    assert report.reference == "fd"
    assert report.linf == pytest.approx(0.005)
    assert report.l1 == pytest.approx(0.01 / 1.5)
    assert report.l2 == pytest.approx(0.01 * math.sqrt(11 / 25.85))


def test_nodes_are_not_area_weighted():
    grid = Grid2D(0.0, 1.0, 0.0, 1.0, 3, 3)
    values = np.zeros(grid.shape)
    values[0, 0], values[2, 1] = 3.0, 4.0
    reference = Field(grid, values)
    approx = Field(grid, np.zeros(grid.shape))
    assert [relative_lp_error(reference, approx, p) for p in (1, 2, "inf")] == [
        1.0,
        1.0,
        1.0,
    ]
    assert lp_norm(reference, 2) == 5.0


def test_relative_error_is_relative_to_reference(unit_grid):
    reference = Field(unit_grid, np.ones(unit_grid.shape))
    doubled = Field(unit_grid, np.full(unit_grid.shape, 2.0))
    assert relative_lp_error(reference, doubled, 1) == pytest.approx(1.0)
    assert relative_lp_error(doubled, reference, 1) == pytest.approx(0.5)

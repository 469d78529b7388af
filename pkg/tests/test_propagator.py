"""Tests for conda_kolmogorov.propagator."""

from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from conda_kolmogorov import parallel
from conda_kolmogorov.drift import affine, table1
from conda_kolmogorov.exceptions import DegenerateGradientRowError, DomainError
from conda_kolmogorov.metrics import relative_lp_error
from conda_kolmogorov.models import Grid2D, PropagateConfig
from conda_kolmogorov.propagator import (
    StepOperator,
    gaussian_ic,
    propagate,
    propagate_steps,
    step,
)
from conda_kolmogorov.selftest import affine_fd_exact


@pytest.fixture
def affine_grid() -> Grid2D:
    return Grid2D(-6.0, 6.0, -4.0, 4.0, 241, 161)


def test_gaussian_ic_mass():
    grid = Grid2D(-6.0, 6.0, -6.0, 6.0, 121, 121)
    assert gaussian_ic(grid, 0.5).mass() == pytest.approx(1.0, abs=1e-8)


def test_gaussian_ic_rejects_variance(small_grid):
    with pytest.raises(DomainError, match="sigma_c2"):
        gaussian_ic(small_grid, 0.0)


@pytest.mark.parametrize("quadrature", ["spectral", "trapezoid"])
def test_exact_affine_matches_closed_form(affine_grid, quadrature):
    settings = PropagateConfig(
        T=0.5, N=1, kernel_mode="exact_affine", quadrature=quadrature
    )
    result = propagate(gaussian_ic(affine_grid, 0.2), affine([-1.0]), settings)
    exact = affine_fd_exact(affine_grid, 0.5, 0.2)
    assert relative_lp_error(exact, result, 2) < 1e-3


def test_pbar_equals_q_for_affine_drift(affine_grid):
    f = gaussian_ic(affine_grid, 0.2)
    pbar = propagate(f, affine([-1.0]), PropagateConfig(T=0.5, N=2, kernel_mode="pbar"))
    q = propagate(f, affine([-1.0]), PropagateConfig(T=0.5, N=2, kernel_mode="q"))
    np.testing.assert_array_equal(pbar.values, q.values)


def test_table1_step_keeps_mass():
    grid = Grid2D(-8.0, 8.0, -3.0, 5.0, 161, 81)
    stepped = step(gaussian_ic(grid, 0.2), table1(), 0.5, PropagateConfig(T=0.5, N=1))
    assert stepped.mass() == pytest.approx(1.0, abs=0.01)


def test_propagate_steps_diagnostics(affine_grid):
    settings = PropagateConfig(T=0.6, N=3, kernel_mode="exact_affine")
    initial = gaussian_ic(affine_grid, 0.2)
    steps = list(propagate_steps(initial, affine([-1.0]), settings))
    assert [k for k, _, _ in steps] == [1, 2, 3]
    for k, field, diag in steps:
        assert diag.step == k
        assert diag.mass == pytest.approx(field.mass())
        assert diag.mass == pytest.approx(1.0, abs=1e-3)


def test_exact_affine_needs_affine_drift(small_grid):
    with pytest.raises(DomainError, match="not affine"):
        StepOperator(
            small_grid, table1(), 0.1, PropagateConfig(kernel_mode="exact_affine")
        )


def test_needs_one_dimensional_drift(small_grid):
    with pytest.raises(DomainError, match="one-dimensional"):
        StepOperator(small_grid, affine([1.0, 1.0]), 0.1, PropagateConfig())


def test_degenerate_gradient_row():
    grid = Grid2D(-4.0, 4.0, 0.0, 8.0, 9, 9)
    with pytest.raises(DegenerateGradientRowError, match="y=6"):
        StepOperator(grid, table1(), 0.1, PropagateConfig())


def test_operator_rejects_foreign_grid(small_grid, affine_grid):
    operator = StepOperator(small_grid, affine([-1.0]), 0.1, PropagateConfig())
    with pytest.raises(DomainError, match="field grid"):
        operator(gaussian_ic(affine_grid, 0.2))


def test_result_independent_of_threads(small_grid):
    f = gaussian_ic(small_grid, 0.3)
    settings = PropagateConfig(T=0.4, N=2)
    parallel.set_max_workers(1)
    serial = propagate(f, table1(), settings)
    parallel.set_max_workers(4)
    threaded = propagate(f, table1(), settings)
    np.testing.assert_array_equal(serial.values, threaded.values)


def test_clamp_negative_removes_negatives(small_grid):
    settings = PropagateConfig(T=1.0, N=1, clamp_negative=True)
    result = propagate(gaussian_ic(small_grid, 0.3), table1(), settings)
    assert np.min(result.values) >= 0.0
    unclamped = propagate(
        gaussian_ic(small_grid, 0.3),
        table1(),
        dataclasses.replace(settings, clamp_negative=False),
    )
    assert result.mass() == pytest.approx(unclamped.mass(), rel=1e-9)


def test_single_iteration_is_one_step(small_grid):
    f = gaussian_ic(small_grid, 0.3)
    settings = PropagateConfig(T=0.8, N=1)
    once = propagate(f, table1(), settings)
    np.testing.assert_array_equal(once.values, step(f, table1(), 0.8, settings).values)


def test_short_step_is_near_identity():
    grid = Grid2D(-3.0, 3.0, -2.5, 2.5, 61, 251)
    f = gaussian_ic(grid, 0.3)
    stepped = step(f, affine([-1.0]), 1e-3, PropagateConfig(T=1e-3, N=1))
    assert relative_lp_error(f, stepped, "inf") < 1e-2


@pytest.mark.parametrize("quadrature", ["spectral", "trapezoid"])
def test_support_cutoff_is_negligible(small_grid, quadrature):
    f = gaussian_ic(small_grid, 0.3)
    settings = PropagateConfig(T=0.5, N=1, quadrature=quadrature)
    wide = dataclasses.replace(settings, support_cutoff_sigmas=1e3)
    cut = propagate(f, table1(), settings)
    full = propagate(f, table1(), wide)
    assert relative_lp_error(full, cut, "inf") < 1e-6

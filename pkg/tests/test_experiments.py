"""Tests for conda_kolmogorov.experiments."""

from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest

from conda_kolmogorov.experiments import (
    FD_REFERENCE,
    fd_reference,
    rate_check,
    reference_is_cached,
    run_table1,
)
from conda_kolmogorov.metrics import relative_lp_error
from conda_kolmogorov.models import (
    DriftConfig,
    FdConfig,
    Grid2D,
    McConfig,
    PropagateConfig,
    RateConfig,
    RunConfig,
    Table1Config,
)
from conda_kolmogorov.propagator import gaussian_ic, propagate


@pytest.fixture
def small_config():
    grid = Grid2D(-6.0, 6.0, -4.0, 4.0, 49, 33)
    return RunConfig(
        scenario="small",
        drift=DriftConfig(preset="affine"),
        sigma_c2=0.5,
        grid=grid,
        propagate=PropagateConfig(T=0.5, N=2),
        mc=McConfig(n_steps=50, n_samples=4000, seed=3),
        fd=FdConfig(grid=grid.refined(), n_t=40),
        table1=Table1Config(iterations=(1, 2), line_cut_y=0.5, line_cut_stride=12),
        rate=RateConfig(times=(0.2, 0.1), y=1.0, reference="mc"),
    )


def test_fd_reference_is_cached(small_config):
    assert not reference_is_cached(small_config)
    first = fd_reference(small_config)
    assert reference_is_cached(small_config)
    assert first.grid == small_config.fd.grid
    second = fd_reference(small_config)
    np.testing.assert_array_equal(first.values, second.values)


def test_fd_reference_without_cache(small_config):
    fd_reference(small_config, use_cache=False)
    assert not reference_is_cached(small_config)


def test_fd_reference_follows_propagation_horizon(small_config):
    longer = dataclasses.replace(small_config, propagate=PropagateConfig(T=1.0, N=2))
    fd_reference(small_config)
    assert not reference_is_cached(longer)


def test_run_table1(small_config):
    result = run_table1(small_config)
    assert [r.n_iterations for r in result.reports] == [1, 2]
    assert {r.reference for r in result.reports} == {FD_REFERENCE}
    assert {r.scenario for r in result.reports} == {"small"}
    assert result.reference.grid == small_config.grid
    assert sorted(result.fields) == [1, 2]
    # the Gaussian kernel is exact for an affine drift
    for report in result.reports:
        assert report.l2 < 0.05


def test_line_cut(small_config):
    cut = run_table1(small_config).line_cut
    assert cut is not None
    assert cut.y == 0.5
    np.testing.assert_array_equal(cut.x, small_config.grid.x)
    np.testing.assert_array_equal(cut.mc_x, small_config.grid.x[::12])
    assert len(cut.mc) == 5
    assert sorted(cut.approximations) == [1, 2]
    centre = cut.mc[2]
    assert centre.n_effective == 4000
    assert centre.deviation(cut.reference[24]) < 5


def test_line_cut_disabled(small_config):
    config = dataclasses.replace(
        small_config, table1=Table1Config(iterations=(1,), line_cut=False)
    )
    assert run_table1(config).line_cut is None


def test_rate_check_against_monte_carlo(small_config):
    result = rate_check(small_config)
    assert result.times == (0.2, 0.1)
    assert all(se > 0 for se in result.exact_std_error)
    # pbar and q coincide for an affine drift
    np.testing.assert_allclose(result.pbar, result.q)
    assert math.isfinite(result.slope)


def test_rate_check_exact_reference():
    result = rate_check(RunConfig(rate=RateConfig(times=(0.4, 0.2))))
    assert result.exact_std_error == (0.0, 0.0)
    errors = result.pbar_errors
    assert errors[1] < errors[0]
    assert result.slope > 0


@pytest.fixture(scope="module")
def table1_result():
    defaults = RunConfig()
    table = dataclasses.replace(defaults.table1, iterations=(1, 2, 5), line_cut=False)
    return run_table1(dataclasses.replace(defaults, table1=table), use_cache=False)


@pytest.mark.slow
def test_table1_errors_decrease_with_iterations(table1_result):
    one, two, five = table1_result.reports
    assert one.l1 > two.l1 > five.l1
    assert one.l2 > two.l2 > five.l2
    assert one.linf > two.linf > five.linf


@pytest.mark.slow
def test_table1_propagation_is_grid_converged(table1_result):
    config = RunConfig()
    fine_grid = config.grid.refined()
    settings = dataclasses.replace(config.propagate, N=5)
    initial = gaussian_ic(fine_grid, config.sigma_c2)
    fine = propagate(initial, config.drift_spec, settings)
    coarse = table1_result.fields[5]
    change = relative_lp_error(fine.restrict_to(config.grid), coarse, 2)
    assert change < 0.1 * table1_result.reports[-1].l2

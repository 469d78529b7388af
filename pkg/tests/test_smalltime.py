"""Tests for conda_kolmogorov.smalltime."""

from __future__ import annotations

import numpy as np
import pytest

from conda_kolmogorov.closed_kernels import gaussian_expectation, linear_khe_kernel
from conda_kolmogorov.drift import (
    WarpSpec,
    affine,
    h_quadratic_closed_form,
    polynomial,
    quadratic,
)
from conda_kolmogorov.exceptions import DegenerateKernelError, DomainError
from conda_kolmogorov.smalltime import (
    apply_kernel_at_point,
    frozen_kernel_q,
    h_correction,
    pbar_kernel,
    warped_pbar_kernel,
)
from conda_kolmogorov.stochastic import gaussian_payoff


def _ones(x, y):
    return np.ones_like(x)


def test_h_correction_matches_closed_form():
    drift = quadratic(0.7, [[1.0]])
    y = np.array([[-1.0], [0.0], [0.5], [2.0]])
    y_prime = np.array([[1.0], [0.3], [2.0], [-1.5]])
    np.testing.assert_allclose(
        h_correction(y, y_prime, drift),
        h_quadratic_closed_form(y, y_prime, 0.7, [[1.0]]),
        rtol=1e-12,
    )


def test_h_correction_two_dimensional():
    omega = [[2.0, 0.5], [0.5, 1.0]]
    drift = quadratic(1.0, omega)
    y, y_prime = np.array([0.2, -0.4]), np.array([1.0, 0.7])
    expected = h_quadratic_closed_form(y, y_prime, 1.0, omega)
    value = float(h_correction(y, y_prime, drift))
    assert value == pytest.approx(float(expected), rel=1e-12)


def test_h_correction_vanishes_for_affine(affine_drift):
    values = h_correction(np.linspace(-2, 2, 5), np.linspace(3, -1, 5), affine_drift)
    np.testing.assert_allclose(values, 0.0)


def test_h_correction_needs_two_nodes(table1_drift):
    with pytest.raises(DomainError, match="quad_order"):
        h_correction(0.0, 1.0, table1_drift, quad_order=1)


def test_frozen_kernel_is_linear_khe_for_affine_drift(affine_drift):
    x_prime = np.linspace(-3.0, 2.0, 11)
    y_prime = np.linspace(-1.0, 2.0, 11)
    q = frozen_kernel_q(0.8, 0.3, 0.5, x_prime, y_prime, affine_drift)
    exact = linear_khe_kernel(0.8, 0.3, [0.5], x_prime, y_prime[:, None], [1.0])
    np.testing.assert_allclose(q, exact, rtol=1e-12)


def test_pbar_equals_q_for_affine_drift(affine_drift):
    x_prime = np.linspace(-3.0, 2.0, 7)
    q = frozen_kernel_q(0.5, 0.0, 1.0, x_prime, 0.4, affine_drift)
    pbar = pbar_kernel(0.5, 0.0, 1.0, x_prime, 0.4, affine_drift)
    np.testing.assert_allclose(pbar, q)


def test_pbar_differs_from_q_for_curved_drift(table1_drift):
    # x' = 1.0 is the frozen mean, where the two coincide
    q = frozen_kernel_q(0.5, 0.0, 1.0, 1.15, 2.0, table1_drift)
    pbar = pbar_kernel(0.5, 0.0, 1.0, 1.15, 2.0, table1_drift)
    assert abs(float(pbar) - float(q)) > 1e-6


def test_frozen_kernel_degenerate_gradient(table1_drift):
    with pytest.raises(DegenerateKernelError, match="frozen"):
        frozen_kernel_q(0.5, 0.0, 6.0, 0.0, 6.0, table1_drift)


def test_frozen_kernel_rejects_time(table1_drift):
    with pytest.raises(DomainError, match="time"):
        pbar_kernel(0.0, 0.0, 1.0, 0.0, 1.0, table1_drift)


def test_warped_identity_is_pbar(table1_drift):
    x_prime = np.linspace(-1.0, 3.0, 9)
    identity = WarpSpec.identity()
    warped = warped_pbar_kernel(0.4, 0.0, 1.0, x_prime, 1.5, table1_drift, identity)
    plain = pbar_kernel(0.4, 0.0, 1.0, x_prime, 1.5, table1_drift)
    np.testing.assert_allclose(warped, plain)


def test_warped_kernel_range(table1_drift):
    with pytest.raises(DomainError, match="z2'"):
        warped_pbar_kernel(
            0.4, 0.0, 1.0, 0.0, -1.0, table1_drift, WarpSpec.exponential()
        )


@pytest.mark.parametrize("mode", ["pbar", "q"], ids=["pbar", "q"])
def test_apply_kernel_preserves_mass(table1_drift, mode):
    mass = apply_kernel_at_point(0.3, 0.0, 1.0, _ones, table1_drift, mode)
    assert mass == pytest.approx(1.0, abs=1e-6)


def test_apply_kernel_exact_for_affine(affine_drift):
    # the frozen kernel is the true kernel, so only quadrature error remains
    t, x, y, sigma_c2 = 0.5, 0.1, 0.4, 0.3
    value = apply_kernel_at_point(t, x, y, gaussian_payoff(sigma_c2), affine_drift, "q")
    mean = np.array([x - t * y, y])
    cov = np.array(
        [[sigma_c2 + t**3 / 3, -(t**2) / 2], [-(t**2) / 2, sigma_c2 + t]]
    )
    exact = np.exp(-0.5 * mean @ np.linalg.solve(cov, mean)) / (
        2 * np.pi * np.sqrt(np.linalg.det(cov))
    )
    assert value == pytest.approx(exact, rel=1e-6)


def test_apply_kernel_short_time_accuracy(table1_drift):
    f = gaussian_payoff(0.2)
    exact = gaussian_expectation(0.1, 0.0, 0.5, table1_drift, 0.2)
    pbar = apply_kernel_at_point(0.1, 0.0, 0.5, f, table1_drift, "pbar")
    assert pbar == pytest.approx(exact, abs=5e-3)


def test_apply_kernel_rejects_mode(table1_drift):
    with pytest.raises(DomainError, match="mode"):
        apply_kernel_at_point(0.1, 0.0, 0.5, _ones, table1_drift, "exact")


def test_apply_kernel_needs_one_dimension():
    with pytest.raises(DomainError, match="one-dimensional"):
        apply_kernel_at_point(0.1, 0.0, 0.5, _ones, affine([1.0, 1.0]), "q")


@pytest.mark.parametrize(
    "coefficients",
    [(0.0, 1.0, 0.5), (1.0, -0.5, 0.25, 0.2), (0.0, 0.5, -1.0, 0.1, 0.3)],
    ids=["quadratic", "cubic", "quartic"],
)
def test_h_correction_order_doubling(coefficients):
    drift = polynomial(coefficients)
    y = np.array([[-1.5], [0.0], [0.7], [2.0]])
    y_prime = np.array([[0.5], [1.2], [-0.4], [3.1]])
    low = h_correction(y, y_prime, drift, quad_order=8)
    high = h_correction(y, y_prime, drift, quad_order=16)
    np.testing.assert_allclose(low, high, rtol=1e-10, atol=1e-12)

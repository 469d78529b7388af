"""Tests for conda_kolmogorov.closed_kernels."""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from conda_kolmogorov.closed_kernels import (
    _quad_transform,
    gaussian_expectation,
    heat_kernel,
    linear_khe_kernel,
    linear_potential_kernel,
    oscillator_factor,
    ou_density,
    ou_khe_kernel,
    ou_potential_kernel,
    ou_sigma_xi2,
    ou_sigma_z2,
    quad_khe_density,
    quad_khe_kernel,
    quadratic_potential_kernel,
    rotate_to_eigenbasis,
)
from conda_kolmogorov.drift import affine, photon
from conda_kolmogorov.exceptions import (
    DegenerateKernelError,
    DomainError,
    SingularityError,
)
from conda_kolmogorov.models import (
    LinearPotentialParams,
    OUParams,
    QuadraticPotentialParams,
)
from conda_kolmogorov.stochastic import estimate_u, gaussian_payoff


def _mass_2d(values, x, y):
    return float(trapezoid(trapezoid(values, y, axis=1), x))


@pytest.mark.parametrize("t", [0.1, 1.0, 4.0], ids=["short", "unit", "long"])
def test_heat_kernel_peak_and_mass(t):
    assert float(heat_kernel(t, [0.0])) == pytest.approx((2 * math.pi * t) ** -0.5)
    z = np.linspace(-12 * math.sqrt(t), 12 * math.sqrt(t), 4001)
    assert trapezoid(heat_kernel(t, z[:, None]), z) == pytest.approx(1.0, abs=1e-10)


def test_heat_kernel_two_dimensional():
    value = heat_kernel(1.0, [1.0, 1.0])
    assert float(value) == pytest.approx(math.exp(-1.0) / (2 * math.pi))


@pytest.mark.parametrize("t", [0.0, -1.0], ids=["zero", "negative"])
def test_heat_kernel_rejects_time(t):
    with pytest.raises(DomainError, match="time must be > 0"):
        heat_kernel(t, [0.0])


@pytest.mark.parametrize(
    ("w", "expected"),
    [
        (0.0, 1.0),
        (1e-8, math.sqrt(1e-4 / math.sin(1e-4))),
        (-1.0, math.sqrt(1.0 / math.sinh(1.0))),
        (-25.0, math.sqrt(5.0 / math.sinh(5.0))),
        (1.0, math.sqrt(1.0 / math.sin(1.0))),
    ],
    ids=["origin", "tiny", "negative", "far-negative", "positive"],
)
def test_oscillator_factor_real_axis(w, expected):
    value = complex(oscillator_factor(w))
    assert value.real == pytest.approx(expected, rel=1e-10)
    assert value.imag == pytest.approx(0.0, abs=1e-12)


def test_oscillator_factor_is_continuous_on_a_ray():
    w = 2j * np.linspace(0.0, 40.0, 2001)
    values = oscillator_factor(w)
    assert np.max(np.abs(np.diff(values))) < 0.05
    assert values[0] == pytest.approx(1.0)


def test_oscillator_factor_conjugate_symmetry():
    w = np.array([3.0 + 4.0j, -2.0 + 7.5j, 12.0j])
    np.testing.assert_allclose(
        oscillator_factor(np.conj(w)), np.conj(oscillator_factor(w))
    )


def test_oscillator_factor_pole():
    with pytest.raises(SingularityError, match="pole"):
        oscillator_factor(math.pi**2)


def test_oscillator_factor_shape():
    assert oscillator_factor(np.zeros((2, 3))).shape == (2, 3)


def test_linear_potential_without_coupling_is_heat():
    params = LinearPotentialParams((1.0,), alpha=0.0)
    value = linear_potential_kernel(0.7, [0.2], [1.1], params)
    assert complex(value) == pytest.approx(float(heat_kernel(0.7, [0.9])))


def test_linear_potential_total_mass():
    t, y, alpha = 1.0, 0.3, 0.5
    z = np.linspace(-12.0, 12.0, 6001)
    params = LinearPotentialParams((1.0,), alpha)
    values = linear_potential_kernel(t, [y], z[:, None], params)
    expected = math.exp(alpha * t * y + alpha**2 * t**3 / 6)
    assert trapezoid(values.real, z) == pytest.approx(expected, rel=1e-8)


def test_quadratic_potential_total_mass():
    params = QuadraticPotentialParams((1.0,), alpha=-1.0)
    z = np.linspace(-10.0, 10.0, 4001)
    values = quadratic_potential_kernel(1.0, [0.0], z[:, None], params)
    assert trapezoid(values.real, z) == pytest.approx(math.cosh(1.0) ** -0.5, rel=1e-8)


def test_quadratic_potential_rejects_zero_rho():
    with pytest.raises(DomainError, match="nonzero"):
        QuadraticPotentialParams((0.0,))


def test_rotate_to_eigenbasis():
    rho, point = rotate_to_eigenbasis([[2.0, 0.0], [0.0, 1.0]], [1.0, 2.0])
    np.testing.assert_allclose(rho, [1.0, 2.0])
    np.testing.assert_allclose(np.abs(point), [2.0, 1.0])


def test_linear_khe_mass():
    x = np.linspace(-8.0, 8.0, 641)
    y = np.linspace(-7.0, 7.0, 561)
    xx, yy = np.meshgrid(x, y, indexing="ij")
    values = linear_khe_kernel(1.0, 0.3, [0.5], xx, yy[..., None], [1.0])
    assert _mass_2d(values, x, y) == pytest.approx(1.0, abs=1e-6)


def test_linear_khe_mean():
    x = np.linspace(-6.0, 6.0, 2401)
    values = linear_khe_kernel(1.0, 0.0, [1.0], x, [1.0], [1.0])
    mean = trapezoid(x * values, x) / trapezoid(values, x)
    assert mean == pytest.approx(-1.0, abs=1e-8)


def test_linear_khe_degenerate():
    with pytest.raises(DegenerateKernelError, match="linear KHE"):
        linear_khe_kernel(1.0, 0.0, [0.0], 0.0, [0.0], [0.0])


def test_quad_khe_density_marginal():
    xi, density = quad_khe_density(1.0, 0.5, -0.2, 1.0)
    mass = trapezoid(density, xi)
    assert mass == pytest.approx(float(heat_kernel(1.0, [-0.7])), rel=1e-5)


def test_quad_khe_density_bridge_mean():
    t, y, yp = 1.0, 0.5, -0.2
    xi, density = quad_khe_density(t, y, yp, 1.0)
    mean = trapezoid(xi * density, xi) / trapezoid(density, xi)
    expected = t * (y * y + y * yp + yp * yp) / 3 + t * t / 6
    assert mean == pytest.approx(expected, rel=1e-3)


def test_quad_khe_kernel_matches_density():
    xi, density = quad_khe_density(1.0, 0.0, 0.0, 1.0)
    value = quad_khe_kernel(1.0, 2.0, 0.0, 2.5, 0.0, 1.0)
    assert float(value) == pytest.approx(float(np.interp(0.5, xi, density)), rel=1e-6)


def test_ou_potential_without_coupling_is_density():
    params = OUParams(0.8, alpha=0.0)
    value = ou_potential_kernel(1.0, 0.3, -0.4, params)
    assert complex(value) == pytest.approx(float(ou_density(1.0, 0.3, -0.4, 0.8)))


def test_ou_potential_signs_differ():
    statement = ou_potential_kernel(1.0, 1.0, 0.5, OUParams(1.0, 1.0, "statement"))
    proof = ou_potential_kernel(1.0, 1.0, 0.5, OUParams(1.0, 1.0, "proof"))
    assert abs(complex(statement) - complex(proof)) > 1e-3


@pytest.mark.parametrize("zeta", [0.0, -1.0], ids=["zero", "negative"])
def test_ou_params_reject_zeta(zeta):
    with pytest.raises(DomainError, match="zeta"):
        OUParams(zeta)


def test_ou_variances_small_zeta_limits():
    t = 1.3
    assert ou_sigma_z2(t, 1e-6) == pytest.approx(t**3 / 3, rel=1e-5)
    assert ou_sigma_xi2(t, 1e-6) == pytest.approx(t**3 / 12, rel=1e-5)


def test_ou_khe_mass():
    x = np.linspace(-8.0, 8.0, 641)
    y = np.linspace(-7.0, 7.0, 561)
    xx, yy = np.meshgrid(x, y, indexing="ij")
    values = ou_khe_kernel(1.0, 0.2, 0.5, xx, yy, 0.7)
    assert _mass_2d(values, x, y) == pytest.approx(1.0, abs=1e-6)


def test_ou_khe_tends_to_linear_khe():
    ou = ou_khe_kernel(1.0, 0.0, 0.5, -0.3, 0.2, 1e-5)
    linear = linear_khe_kernel(1.0, 0.0, [0.5], -0.3, [0.2], [1.0])
    assert float(ou) == pytest.approx(float(linear), rel=1e-4)


def test_gaussian_expectation_needs_quadratic():
    with pytest.raises(DomainError, match="quadratic"):
        gaussian_expectation(1.0, 0.0, 0.0, affine([-1.0]), 0.2)


def test_gaussian_expectation_matches_monte_carlo(small_mc):
    drift = photon()
    exact = gaussian_expectation(0.5, 0.0, 0.5, drift, 1.0)
    estimate = estimate_u(0.5, 0.0, 0.5, gaussian_payoff(1.0), drift, small_mc)
    assert abs(estimate.mean - exact) <= 4 * estimate.std_error + 2e-3


def test_quadratic_kernel_factorizes_over_coordinates():
    t, y, z = 0.8, np.array([0.3, -0.5]), np.array([0.1, 0.4])
    joint = quadratic_potential_kernel(
        t, y, z, QuadraticPotentialParams((1.0, 2.0), alpha=-1.0)
    )
    first = quadratic_potential_kernel(
        t, y[:1], z[:1], QuadraticPotentialParams((1.0,), alpha=-1.0)
    )
    second = quadratic_potential_kernel(
        t, y[1:], z[1:], QuadraticPotentialParams((2.0,), alpha=-1.0)
    )
    np.testing.assert_allclose(joint, first * second, rtol=1e-12)


@pytest.mark.parametrize("gamma", [0.5, 1.0, 3.0])
def test_linear_kernel_modulus_for_imaginary_alpha(gamma):
    t, y, z, a = 1.2, np.array([0.4, -0.1]), np.array([-0.3, 0.6]), (1.0, 0.5)
    params = LinearPotentialParams(a, alpha=1j * gamma)
    value = linear_potential_kernel(t, y, z, params)
    norm2 = 1.0 + 0.25
    expected = math.exp(-(gamma**2) * norm2 * t**3 / 24) * heat_kernel(t, z - y)
    assert abs(complex(value)) == pytest.approx(float(expected), rel=1e-12)


@pytest.mark.parametrize(
    "y, y_prime, rho", [(0.0, 0.0, 1.0), (0.5, -0.3, 2.0), (-1.0, 1.5, 0.5)]
)
def test_quad_transform_bounded_by_heat_kernel(y, y_prime, rho):
    t = 0.7
    gamma = np.linspace(0.0, 50.0, 501)
    values = _quad_transform(t, y, y_prime, rho, gamma)
    bound = float(heat_kernel(t, [y_prime - y]))
    assert np.all(np.abs(values) <= bound * (1 + 1e-9))
    assert abs(values[0]) == pytest.approx(bound, rel=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("end", [40j, 30 + 20j], ids=["imaginary", "oblique"])
def test_oscillator_factor_has_no_jumps_on_fine_ray(end):
    values = oscillator_factor(end * np.linspace(0.0, 1.0, 10_001))
    d = np.abs(np.diff(values))
    neighbours = np.maximum(d[:-2], d[2:])
    assert np.all(d[1:-1] <= 2 * neighbours + 1e-14)
    assert np.max(d) < 0.05

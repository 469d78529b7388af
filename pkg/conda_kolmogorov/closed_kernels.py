"""Closed-form fundamental solutions.

Parabolic kernels ``p^V(t, y, z)`` with linear, quadratic and
Ornstein-Uhlenbeck potentials, and the hypoelliptic (KHE) kernels
``p(t, x, y, x', y')`` they induce through a Fourier transform in ``x``.
All functions are pure and thread-safe.

Conventions: the KHE drift enters as ``dX = c(Y) dt``; the linear KHE uses
``c(y) = -<a, y>`` and the quadratic KHE ``c(y) = sum rho_i y_i^2``.
"""

from __future__ import annotations

import math
import warnings
from logging import getLogger
from typing import TYPE_CHECKING

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import fftconvolve

from .exceptions import (
    DegenerateKernelError,
    DomainError,
    InversionAccuracyWarning,
    SingularityError,
)
from .models import FourierInversionConfig

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

    from .drift import DriftSpec
    from .models import LinearPotentialParams, OUParams, QuadraticPotentialParams

log = getLogger(__name__)

_SERIES_CUTOFF = 1e-3
_PHASE_STEP = np.pi / 4
_RAY_BUDGET = 2**22


def _check_time(t: float) -> None:
    if not t > 0:
        raise DomainError("t", t, "time must be > 0")


def _vec(v: ArrayLike) -> NDArray[np.float64]:
    return np.atleast_1d(np.asarray(v, dtype=float))


def heat_kernel(t: float, z: ArrayLike) -> NDArray[np.float64]:
    """``(2 pi t)^(-d/2) exp(-|z|^2 / 2t)``; the last axis of *z* is ``d``."""
    _check_time(t)
    z = _vec(z)
    d = z.shape[-1]
    return (2 * np.pi * t) ** (-d / 2) * np.exp(-np.sum(z * z, axis=-1) / (2 * t))


def linear_potential_kernel(
    t: float, y: ArrayLike, z: ArrayLike, params: LinearPotentialParams
) -> NDArray[np.complex128]:
    """Kernel of ``u_t = 1/2 Laplace u + alpha <a, y> u`` (exact)."""
    _check_time(t)
    y, z = _vec(y), _vec(z)
    a = _vec(params.a)
    alpha = complex(params.alpha)
    sigma_xi2 = t**3 / 12
    expo = alpha * t / 2 * ((z + y) @ a) + (a @ a) * alpha**2 / 2 * sigma_xi2
    return np.exp(expo) * heat_kernel(t, z - y)


# -- oscillator factor --------------------------------------------------------


def _log_sinc_ratio(w: NDArray[np.complex128]) -> NDArray[np.complex128]:
    """``log(sqrt(w) / sin(sqrt(w)))`` with the imaginary part only mod 2 pi.

    The ratio is even in ``sqrt(w)``, so the root with ``Im >= 0`` is used and
    ``sin`` is factored as ``e^{-is} (e^{2is} - 1) / 2i`` to stay finite.
    """
    w = np.asarray(w, dtype=complex)
    s = np.sqrt(w)
    s = np.where(s.imag < 0, -s, s)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.log(s) + 1j * s - np.log((np.exp(2j * s) - 1) / 2j)
    series = w / 6 + w * w / 180
    return np.where(np.abs(s) < _SERIES_CUTOFF, series, direct)


def _check_poles(w: NDArray[np.complex128], tol: float) -> None:
    s = np.sqrt(w)
    s = np.where(s.imag < 0, -s, s)
    sin_mod = np.exp(s.imag) * np.abs(np.exp(2j * s) - 1) / 2
    bad = (sin_mod < tol) & (np.abs(s) >= _SERIES_CUTOFF)
    if np.any(bad):
        raise SingularityError(complex(w[np.argmax(bad)]), tol)


def _ray_phase(w: NDArray[np.complex128]) -> NDArray[np.float64]:
    """Accumulated argument of the sinc ratio along ``s * w``, ``s`` in [0, 1]."""
    out = np.empty(w.size)
    n = 16
    start = 0
    while start < w.size:
        rows = max(1, _RAY_BUDGET // (n + 1))
        chunk = w[start : start + rows]
        s = np.linspace(0.0, 1.0, n + 1)
        phase = np.unwrap(_log_sinc_ratio(chunk[:, None] * s[None, :]).imag, axis=1)
        step = np.max(np.abs(np.diff(phase, axis=1)), initial=0.0)
        if step >= _PHASE_STEP and n < 2**16:
            n *= 2
            continue
        out[start : start + chunk.size] = phase[:, -1]
        start += chunk.size
    return out


def oscillator_factor(
    w: ArrayLike, *, pole_tol: float = 1e-10
) -> NDArray[np.complex128]:
    """``(sqrt(w) / sin(sqrt(w)))^(1/2)``, continuous from 1 at ``w = 0``.

    The outer root follows the accumulated argument along the straight path
    from 0 to *w*.  On the positive real axis past the first pole the value
    is the limit from the upper half plane; each pole passed adds ``-pi``.
    """
    w_arr = np.asarray(w, dtype=complex)
    flat = np.atleast_1d(w_arr).ravel()
    _check_poles(flat, pole_tol)
    logs = _log_sinc_ratio(flat)
    phase = np.zeros(flat.size)
    on_axis = (flat.imag == 0) & (flat.real > 0)
    phase[on_axis] = -np.pi * np.floor(np.sqrt(flat.real[on_axis]) / np.pi)
    off_axis = ~on_axis & (flat != 0)
    if np.any(off_axis):
        phase[off_axis] = _ray_phase(flat[off_axis])
    out = np.exp(0.5 * (logs.real + 1j * phase)).reshape(w_arr.shape)
    return out[()] if out.ndim == 0 else out


def _oscillator_factor_path(w_path: NDArray[np.complex128]) -> NDArray[np.complex128]:
    """Oscillator factor along an ordered path that starts at ``w = 0``."""
    logs = _log_sinc_ratio(w_path)
    phase = np.unwrap(logs.imag)
    if np.max(np.abs(np.diff(phase)), initial=0.0) >= _PHASE_STEP:
        return oscillator_factor(w_path)
    return np.exp(0.5 * (logs.real + 1j * phase))


def _action(
    t: float, y: ArrayLike, z: ArrayLike, w: ArrayLike
) -> NDArray[np.complex128]:
    """Per-coordinate action ``S`` of the quadratic potential, ``u = sqrt(-w)``.

    ``S = ((y^2 + z^2) u coth u - 2 y z u / sinh u) / 2t``; both ratios are
    even in ``u`` and are evaluated with ``Re u >= 0``.
    """
    u = np.sqrt(-np.asarray(w, dtype=complex))
    u = np.where(u.real < 0, -u, u)
    u2 = u * u
    e = np.exp(-2 * u)
    with np.errstate(divide="ignore", invalid="ignore"):
        u_coth = u * (1 + e) / (1 - e)
        u_csch = 2 * u * np.exp(-u) / (1 - e)
    small = np.abs(u) < _SERIES_CUTOFF
    u_coth = np.where(small, 1 + u2 / 3 - u2 * u2 / 45, u_coth)
    u_csch = np.where(small, 1 - u2 / 6 + 7 * u2 * u2 / 360, u_csch)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    return ((y * y + z * z) * u_coth - 2 * y * z * u_csch) / (2 * t)


def quadratic_potential_kernel(
    t: float,
    y: ArrayLike,
    z: ArrayLike,
    params: QuadraticPotentialParams,
    *,
    pole_tol: float = 1e-10,
) -> NDArray[np.complex128]:
    """Kernel of ``u_t = 1/2 Laplace u + alpha/2 sum rho_i y_i^2 u`` (Mehler form).

    *y* and *z* are coordinates in the eigenbasis of the quadratic form.
    """
    _check_time(t)
    y, z = _vec(y), _vec(z)
    rho = _vec(params.rho)
    w = complex(params.alpha) * rho * t * t
    factor = np.prod(oscillator_factor(np.atleast_1d(w), pole_tol=pole_tol))
    action = np.sum(_action(t, y, z, w), axis=-1)
    return factor * np.exp(-action) * (2 * np.pi * t) ** (-rho.size / 2)


def rotate_to_eigenbasis(
    omega: ArrayLike, *points: ArrayLike
) -> tuple[NDArray[np.float64], ...]:
    """Eigenvalues of symmetric *omega* followed by *points* in its eigenbasis."""
    rho, basis = np.linalg.eigh(np.atleast_2d(np.asarray(omega, dtype=float)))
    return (rho, *(np.asarray(p, dtype=float) @ basis for p in points))


# -- hypoelliptic kernels ------------------------------------------------------


def linear_khe_kernel(
    t: float,
    x: ArrayLike,
    y: ArrayLike,
    x_prime: ArrayLike,
    y_prime: ArrayLike,
    a: ArrayLike,
) -> NDArray[np.float64]:
    """Transition density of ``dX = -<a, Y> dt, dY = dW``."""
    _check_time(t)
    a = _vec(a)
    norm2 = float(a @ a)
    if norm2 == 0:
        raise DegenerateKernelError(
            "linear KHE", "|a| = 0 makes the x-marginal a Dirac mass"
        )
    y, yp = _vec(y), _vec(y_prime)
    mean = np.asarray(x, dtype=float) - t / 2 * ((y + yp) @ a)
    var = norm2 * t**3 / 12
    gauss = np.exp(-((np.asarray(x_prime, dtype=float) - mean) ** 2) / (2 * var))
    return gauss / math.sqrt(2 * np.pi * var) * heat_kernel(t, yp - y)


def _quad_transform(
    t: float, y: float, y_prime: float, rho: float, gamma: NDArray[np.float64]
) -> NDArray[np.complex128]:
    """``E[exp(i gamma rho int Y^2); Y_t in dy']`` for increasing ``gamma >= 0``."""
    w = 2j * gamma * rho * t * t
    factor = _oscillator_factor_path(w)
    return factor * np.exp(-_action(t, y, y_prime, w)) / math.sqrt(2 * np.pi * t)


def _quad_transform_at(
    t: float, y: float, y_prime: float, rho: float, gamma: float
) -> complex:
    w = 2j * gamma * rho * t * t
    factor = oscillator_factor(w)
    value = factor * np.exp(-_action(t, y, y_prime, w)) / math.sqrt(2 * np.pi * t)
    return complex(value)


def _gap_scale(t: float, y: float, y_prime: float, rho: float) -> float:
    mean = rho * (t * (y * y + y * y_prime + y_prime * y_prime) / 3 + t * t / 6)
    reach = abs(y) + abs(y_prime) + 2 * math.sqrt(t)
    spread = 10 * abs(rho) * t * reach * math.sqrt(t)
    return abs(mean) + spread


def quad_khe_density(
    t: float,
    y: ArrayLike,
    y_prime: ArrayLike,
    rho: ArrayLike,
    config: FourierInversionConfig | None = None,
    gaps: ArrayLike | None = None,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Density of the x-gap ``x' - x`` jointly with ``Y_t = y'`` on an FFT grid.

    Returns ``(xi, u)`` with ``u(xi) = p(t, x, y, x + xi, y')``.  Each
    coordinate's transform is inverted by the trapezoid rule on
    ``[-Gamma, Gamma)``; ``d > 1`` convolves the per-coordinate densities.
    """
    _check_time(t)
    cfg = config or FourierInversionConfig()
    y, yp, rho = _vec(y), _vec(y_prime), _vec(rho)
    if np.any(rho == 0):
        raise DomainError("rho", rho.tolist(), "every eigenvalue must be nonzero")

    gamma_max = 0.0
    for yi, ypi, ri in zip(y, yp, rho):
        at_zero = abs(_quad_transform_at(t, yi, ypi, ri, 0.0))
        gamma = cfg.gamma_max or 200.0 / t
        if at_zero == 0:
            gamma_max = max(gamma_max, gamma)
            continue
        for _ in range(cfg.max_doublings):
            if abs(_quad_transform_at(t, yi, ypi, ri, gamma)) <= cfg.tail_tol * at_zero:
                break
            gamma *= 2
        else:
            tail = abs(_quad_transform_at(t, yi, ypi, ri, gamma))
            if tail > cfg.tail_tol * at_zero:
                warnings.warn(
                    f"Fourier tail |f(Gamma)|={tail:.3g} "
                    f"above {cfg.tail_tol:g} of |f(0)| "
                    f"at Gamma={gamma:.4g}",
                    InversionAccuracyWarning,
                    stacklevel=2,
                )
        gamma_max = max(gamma_max, gamma)

    half_range = 1.25 * sum(_gap_scale(t, *args) for args in zip(y, yp, rho))
    if gaps is not None:
        half_range = max(half_range, 1.25 * float(np.max(np.abs(gaps))))
    d_xi = np.pi / gamma_max
    n = max(cfg.n_points, 4)
    while n * d_xi / 2 < half_range and n < cfg.max_points:
        n *= 2
    if n * d_xi / 2 < half_range:
        warnings.warn(
            f"x-gap grid half-width {n * d_xi / 2:.4g} does not cover {half_range:.4g}",
            InversionAccuracyWarning,
            stacklevel=2,
        )
    n -= n % 4
    d_gamma = 2 * gamma_max / n
    log.debug("quad KHE inversion: Gamma=%.4g n=%d d_xi=%.3g", gamma_max, n, d_xi)

    half = n // 2
    positive = np.arange(half + 1) * d_gamma
    signs = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    xi = (np.arange(n) - half) * d_xi
    density = None
    for yi, ypi, ri in zip(y, yp, rho):
        f_pos = _quad_transform(t, yi, ypi, ri, positive)
        full = np.empty(n, dtype=complex)
        full[half:] = f_pos[:half]
        full[:half] = np.conj(f_pos[1:][::-1])
        # e^{-i gamma xi} weighting; conj(f) turns it into a plain inverse FFT.
        u = d_gamma / (2 * np.pi) * signs * n * np.fft.ifft(np.conj(full) * signs)
        u = u.real
        if density is None:
            density = u
        else:
            density = fftconvolve(density, u)[half : half + n] * d_xi
    return xi, density


def quad_khe_kernel(
    t: float,
    x: ArrayLike,
    y: ArrayLike,
    x_prime: ArrayLike,
    y_prime: ArrayLike,
    rho: ArrayLike,
    x_grid: FourierInversionConfig | None = None,
) -> NDArray[np.float64]:
    """Transition density of ``dX = sum rho_i Y_i^2 dt, dY = dW``."""
    gaps = np.asarray(x_prime, dtype=float) - np.asarray(x, dtype=float)
    xi, density = quad_khe_density(t, y, y_prime, rho, x_grid, gaps=gaps)
    return np.interp(gaps, xi, density, left=0.0, right=0.0)


# -- Ornstein-Uhlenbeck family ---------------------------------------------------


def _phi(a: float) -> float:
    """``(a - 2(1 - e^-a) + (1 - e^-2a)/2) / a^3``."""
    if a < 1e-2:
        return 1 / 3 - a / 4 + 7 * a * a / 60 - a**3 / 24 + 31 * a**4 / 2520
    return (a + 2 * math.expm1(-a) - math.expm1(-2 * a) / 2) / a**3


def _psi(a: float) -> float:
    """``(1 - e^-a)^3 / ((1 + e^-a) 2 a^3)``."""
    m = -math.expm1(-a)
    return (m / a) ** 3 / (2 * (2 - m))


def ou_sigma_z2(t: float, zeta: float) -> float:
    """Variance of ``int_0^t Y ds`` for the OU process ``dY = dW - zeta Y dt``."""
    return t**3 * _phi(zeta * t)


def ou_sigma_xi2(t: float, zeta: float) -> float:
    """Residual variance of ``int_0^t Y ds`` after regressing on ``Y_t``."""
    a = zeta * t
    return t**3 * (_phi(a) - _psi(a))


def ou_omega(t: float, zeta: float) -> float:
    """Regression coefficient ``tanh(zeta t / 2) / zeta``."""
    return math.tanh(zeta * t / 2) / zeta


def _check_ou(t: float, zeta: float) -> None:
    _check_time(t)
    if not zeta > 0:
        raise DomainError("zeta", zeta, "must be > 0")


def ou_density(
    t: float, y: ArrayLike, z: ArrayLike, zeta: float
) -> NDArray[np.float64]:
    """Transition density of ``dY = dW - zeta Y dt``."""
    _check_ou(t, zeta)
    var = -math.expm1(-2 * zeta * t) / (2 * zeta)
    mean = np.asarray(y, dtype=float) * math.exp(-zeta * t)
    return np.exp(-((np.asarray(z, dtype=float) - mean) ** 2) / (2 * var)) / math.sqrt(
        2 * np.pi * var
    )


def ou_potential_kernel(
    t: float, y: ArrayLike, z: ArrayLike, params: OUParams
) -> NDArray[np.complex128]:
    """``E^y[exp(alpha int_0^t Y ds) | Y_t = z]`` times the OU density at *z*."""
    zeta = params.zeta
    _check_ou(t, zeta)
    alpha = complex(params.alpha)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    decay = math.exp(-zeta * t)
    sign = 1.0 if params.sign == "statement" else -1.0
    expo = (
        alpha * y * (-math.expm1(-zeta * t)) / zeta
        + sign * alpha * ou_omega(t, zeta) * (z - y * decay)
        + alpha**2 / 2 * ou_sigma_xi2(t, zeta)
    )
    return np.exp(expo) * ou_density(t, y, z, zeta)


def ou_khe_kernel(
    t: float,
    x: ArrayLike,
    y: ArrayLike,
    x_prime: ArrayLike,
    y_prime: ArrayLike,
    zeta: float,
) -> NDArray[np.float64]:
    """Transition density of ``dX = -Y dt, dY = dW - zeta Y dt``.

    The x'-mean is ``x - y(1 - e^-zt)/z - tanh(zt/2)/z (y' - y e^-zt)``, which
    tends to the linear KHE mean ``x - t(y + y')/2`` as ``zeta -> 0``.
    """
    _check_ou(t, zeta)
    y = np.asarray(y, dtype=float)
    yp = np.asarray(y_prime, dtype=float)
    decay = math.exp(-zeta * t)
    mean = (
        np.asarray(x, dtype=float)
        - y * (-math.expm1(-zeta * t)) / zeta
        - ou_omega(t, zeta) * (yp - y * decay)
    )
    var = ou_sigma_xi2(t, zeta)
    gauss = np.exp(-((np.asarray(x_prime, dtype=float) - mean) ** 2) / (2 * var))
    return gauss / math.sqrt(2 * np.pi * var) * ou_density(t, y, yp, zeta)


# -- exact expectations for quadratic drifts -------------------------------------


def gaussian_expectation(
    t: float,
    x: float,
    y: float,
    drift: DriftSpec,
    sigma_c2: float,
    *,
    n_gamma: int = 801,
    n_y: int = 801,
) -> float:
    """``E^{x,y}[f(X_t, Y_t)]`` for the centred Gaussian density *f* of variance
    *sigma_c2*, when ``c`` is a one-dimensional quadratic.

    Completing the square turns ``int c(Y)`` into a quadratic KHE; the x-integral
    is done on the Fourier side, where *f* is a Gaussian.
    """
    _check_time(t)
    origin = np.zeros((1, 1))
    c0 = float(drift.value(origin)[0])
    c1 = float(drift.gradient(origin)[0, 0])
    c2 = float(drift.hessian(origin)[0, 0, 0]) / 2
    sample = np.array([[1.7], [-2.3]])
    if drift.dim != 1 or c2 == 0 or not np.allclose(
        drift.value(sample), c0 + c1 * sample[:, 0] + c2 * sample[:, 0] ** 2
    ):
        raise DomainError(
            "drift", drift.name, "needs a one-dimensional quadratic drift"
        )
    center = -c1 / (2 * c2)
    shift = x + t * (c0 - c1 * c1 / (4 * c2))

    sigma = math.sqrt(sigma_c2)
    gamma = np.linspace(-12 / sigma, 12 / sigma, n_gamma)
    y_nodes = np.linspace(y - 12 * math.sqrt(t), y + 12 * math.sqrt(t), n_y)
    w = 2j * gamma * c2 * t * t
    factor = oscillator_factor(w)
    action = _action(t, y - center, y_nodes[None, :] - center, w[:, None])
    transform = (
        np.exp(1j * gamma[:, None] * shift)
        * factor[:, None]
        * np.exp(-action)
        / math.sqrt(2 * np.pi * t)
    )
    weight = np.exp(-sigma_c2 * gamma**2 / 2) / (2 * np.pi)
    x_part = trapezoid(weight[:, None] * transform, gamma, axis=0).real
    y_density = np.exp(-(y_nodes**2) / (2 * sigma_c2)) / math.sqrt(2 * np.pi * sigma_c2)
    return float(trapezoid(x_part * y_density, y_nodes))

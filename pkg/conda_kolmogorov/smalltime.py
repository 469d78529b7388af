"""Small-time approximation of the hypoelliptic kernel ``p^c``.

The drift is frozen at first order around the starting point ``y`` to get
the Gaussian kernel ``q``; the correction ``H(y, y')`` then gives the
approximated kernel ``pbar``.  ``pbar`` is an expansion, not a density: it
can be negative far in the x'-tails.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import roots_legendre

from .closed_kernels import heat_kernel
from .exceptions import DegenerateKernelError, DomainError

if TYPE_CHECKING:
    from collections.abc import Callable
    from typing import Literal

    from numpy.typing import ArrayLike, NDArray

    from .drift import DriftSpec, WarpSpec


@lru_cache(maxsize=16)
def _unit_gauss_legendre(order: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    nodes, weights = roots_legendre(order)
    return (nodes + 1.0) / 2.0, weights / 2.0


def _as_points(y: ArrayLike, dim: int) -> NDArray[np.float64]:
    """Give *y* a trailing ``d`` axis; scalars and flat arrays count as 1-D points."""
    arr = np.asarray(y, dtype=float)
    if dim == 1 and (arr.ndim == 0 or arr.shape[-1] != 1):
        arr = arr[..., None]
    if arr.shape[-1] != dim:
        raise DomainError(
            "y", arr.shape, f"last axis must have the drift dimension {dim}"
        )
    return arr


def h_correction(
    y: ArrayLike, y_prime: ArrayLike, drift: DriftSpec, quad_order: int = 32
) -> NDArray[np.float64]:
    """``H(y, y') = int_0^1 int_0^1 s^2 D^T h c''(y + (1-h) s D) D dh ds``.

    Here ``D = y' - y``.  Evaluated with a tensor-product Gauss-Legendre
    rule of *quad_order* nodes per axis; exact for polynomial drifts of
    degree up to ``quad_order - 1``.
    """
    if quad_order < 2:
        raise DomainError("quad_order", quad_order, "must be >= 2")
    y = _as_points(y, drift.dim)
    delta = _as_points(y_prime, drift.dim) - y
    y, delta = np.broadcast_arrays(y, delta)
    nodes, weights = _unit_gauss_legendre(quad_order)
    h, s = nodes[:, None], nodes[None, :]
    offsets = ((1.0 - h) * s)[..., None] * delta[..., None, None, :]
    points = y[..., None, None, :] + offsets
    hess = drift.hessian(points)
    form = np.einsum("...i,...hsij,...j->...hs", delta, hess, delta)
    weight = (weights * nodes)[:, None] * (weights * nodes**2)[None, :]
    return np.sum(form * weight, axis=(-2, -1))


def _frozen_terms(t: float, x, y, x_prime, y_prime, drift: DriftSpec):
    """Frozen mean ``mu``, x'-variance ``s2``, ``|c'(y)|^2`` and the y'-heat factor."""
    if not t > 0:
        raise DomainError("t", t, "time must be > 0")
    y = _as_points(y, drift.dim)
    y_prime = _as_points(y_prime, drift.dim)
    grad = drift.gradient(y)
    norm2 = np.sum(grad * grad, axis=-1)
    if np.any(np.sqrt(norm2) <= drift.eps_grad):
        raise DegenerateKernelError(
            "frozen", f"|c'(y)| <= eps-grad={drift.eps_grad:g} at some starting point"
        )
    delta = y_prime - y
    mu = np.asarray(x, dtype=float) + t * (
        drift.value(y) + 0.5 * np.sum(grad * delta, axis=-1)
    )
    s2 = norm2 * t**3 / 12.0
    gap = mu - np.asarray(x_prime, dtype=float)
    return y, y_prime, gap, s2, norm2, heat_kernel(t, delta)


def frozen_kernel_q(
    t: float,
    x: ArrayLike,
    y: ArrayLike,
    x_prime: ArrayLike,
    y_prime: ArrayLike,
    drift: DriftSpec,
) -> NDArray[np.float64]:
    """Gaussian kernel with the drift frozen at first order around *y*."""
    _, _, gap, s2, _, heat = _frozen_terms(t, x, y, x_prime, y_prime, drift)
    return np.exp(-(gap**2) / (2 * s2)) / np.sqrt(2 * np.pi * s2) * heat


def pbar_kernel(
    t: float,
    x: ArrayLike,
    y: ArrayLike,
    x_prime: ArrayLike,
    y_prime: ArrayLike,
    drift: DriftSpec,
    quad_order: int = 32,
) -> NDArray[np.float64]:
    """``q * (1 - 12 (mu - x') H(y, y') / (t^2 |c'(y)|^2))``.

    ``mu`` is the frozen x'-mean ``x + t (c(y) + <c'(y), y' - y> / 2)``.
    """
    y, y_prime, gap, s2, norm2, heat = _frozen_terms(t, x, y, x_prime, y_prime, drift)
    q = np.exp(-(gap**2) / (2 * s2)) / np.sqrt(2 * np.pi * s2) * heat
    h = h_correction(y, y_prime, drift, quad_order)
    return q * (1.0 - 12.0 * gap * h / (t * t * norm2))


def warped_pbar_kernel(
    t: float,
    z1: ArrayLike,
    z2: ArrayLike,
    z1_prime: ArrayLike,
    z2_prime: ArrayLike,
    drift: DriftSpec,
    warp: WarpSpec,
) -> NDArray[np.float64]:
    """Approximate density of ``(Z1, Z2) = (X, phi(Y))``.

    ``pbar(t, z1, phi^-1(z2), z1', phi^-1(z2')) |(phi^-1)'(z2')|``; with
    ``c = phi`` this is the system ``dZ1 = Z2 dt, Z2 = phi(W)``.
    """
    z2 = warp.check_range(z2, "z2")
    z2_prime = warp.check_range(z2_prime, "z2'")
    y = warp.phi_inverse(z2)
    y_prime = warp.phi_inverse(z2_prime)
    jacobian = np.abs(warp.phi_inverse_derivative(z2_prime))
    return pbar_kernel(t, z1, y, z1_prime, y_prime, drift) * jacobian


def apply_kernel_at_point(
    t: float,
    x: float,
    y: float,
    f: Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray[np.float64]],
    drift: DriftSpec,
    mode: Literal["pbar", "q"] = "pbar",
    *,
    n_x: int = 401,
    n_y: int = 401,
    width: float = 10.0,
) -> float:
    """``int int k(t, x, y, x', y') f(x', y') dx' dy'`` for one starting point.

    The y'-grid spans ``y +- width sqrt(t)``; every y'-row gets its own
    x'-grid centred on the frozen mean, ``width`` standard deviations wide.
    """
    if drift.dim != 1:
        raise DomainError("drift", drift.name, "needs a one-dimensional drift")
    if mode not in ("pbar", "q"):
        raise DomainError("mode", mode, "pbar or q")
    grad = float(drift.gradient(np.array([[y]]))[0, 0])
    c0 = float(drift.value(np.array([[y]]))[0])
    sd = abs(grad) * t**1.5 / math.sqrt(12.0)
    y_nodes = np.linspace(y - width * math.sqrt(t), y + width * math.sqrt(t), n_y)
    mu = x + t * (c0 + 0.5 * grad * (y_nodes - y))
    x_nodes = mu[:, None] + sd * width * np.linspace(-1.0, 1.0, n_x)[None, :]
    y_mesh = np.broadcast_to(y_nodes[:, None], x_nodes.shape)
    values = frozen_kernel_q(t, x, y, x_nodes, y_mesh, drift)
    if mode == "pbar":
        # H depends on y' only; one evaluation per row.
        h = h_correction(y, y_nodes, drift)
        gap = mu[:, None] - x_nodes
        values = values * (1.0 - 12.0 * gap * h[:, None] / (t * t * grad * grad))
    rows = trapezoid(values * f(x_nodes, y_mesh), x_nodes, axis=1)
    return float(trapezoid(rows, y_nodes))

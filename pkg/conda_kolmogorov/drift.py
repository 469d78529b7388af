"""Drift fields ``c(y)`` and monotone coordinate warps.

Every callable takes arrays whose last axis is the y-dimension ``d`` and
broadcasts over the leading axes: ``value`` returns shape ``(...)``,
``gradient`` ``(..., d)`` and ``hessian`` ``(..., d, d)``.  Callables must be
reentrant; kernels and samplers call them from worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING

import numpy as np
from numpy.polynomial import Polynomial

from .exceptions import ConfigError, DomainError, InvalidDriftError

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from numpy.typing import ArrayLike, NDArray

    from .models import DriftConfig

    ArrayFn = Callable[[NDArray[np.float64]], NDArray[np.float64]]


@dataclass(frozen=True)
class DriftSpec:
    """A C^3 drift ``c: R^d -> R`` with its derivatives.

    ``affine`` holds ``(gradient, offset)`` when ``c`` is affine; it enables
    the exact Gaussian kernel.  ``signature`` is a stable text description
    used for cache keys and run manifests.
    """

    name: str
    dim: int
    value: ArrayFn
    gradient: ArrayFn
    hessian: ArrayFn
    third: ArrayFn | None = None
    affine: tuple[NDArray[np.float64], float] | None = None
    signature: str = ""
    eps_grad: float = 1e-8

    def gradient_norm(self, y: ArrayLike) -> NDArray[np.float64]:
        return np.linalg.norm(self.gradient(np.asarray(y, dtype=float)), axis=-1)

    def with_eps_grad(self, eps_grad: float) -> DriftSpec:
        return replace(self, eps_grad=eps_grad)

    def validate(self, points: ArrayLike | None = None) -> None:
        """Check Hessian symmetry and the gradient against central differences.

        Raises :class:`InvalidDriftError` on the first failing point.
        """
        if points is None:
            points = np.random.default_rng(0).normal(scale=2.0, size=(16, self.dim))
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        hess = self.hessian(pts)
        asym = np.max(np.abs(hess - np.swapaxes(hess, -1, -2)))
        if asym > 1e-12 * max(1.0, float(np.max(np.abs(hess)))):
            raise InvalidDriftError(
                self.name, f"Hessian not symmetric (max gap {asym:.3g})"
            )
        grad = self.gradient(pts)
        for k in range(self.dim):
            h = 1e-5 * np.maximum(1.0, np.abs(pts[:, k]))
            step = np.zeros_like(pts)
            step[:, k] = h
            fd = (self.value(pts + step) - self.value(pts - step)) / (2 * h)
            scale = np.maximum(1.0, np.linalg.norm(grad, axis=-1))
            gap = np.abs(fd - grad[:, k]) / scale
            if np.any(gap > 1e-5):
                raise InvalidDriftError(
                    self.name,
                    f"gradient component {k} disagrees with finite differences "
                    f"(relative gap {float(np.max(gap)):.3g})",
                )


def polynomial(coefficients: Sequence[float], name: str | None = None) -> DriftSpec:
    """One-dimensional polynomial drift ``c(y) = sum_k coefficients[k] y^k``."""
    coefs = tuple(float(c) for c in coefficients)
    if not coefs:
        raise ConfigError("drift.coefficients", "need at least one coefficient")
    poly = Polynomial(coefs)
    d1, d2, d3 = poly.deriv(1), poly.deriv(2), poly.deriv(3)

    def value(y):
        return poly(np.asarray(y, dtype=float)[..., 0])

    def gradient(y):
        return d1(np.asarray(y, dtype=float)[..., 0])[..., None]

    def hessian(y):
        return d2(np.asarray(y, dtype=float)[..., 0])[..., None, None]

    def third(y):
        return d3(np.asarray(y, dtype=float)[..., 0])[..., None, None, None]

    trimmed = poly.trim()
    affine = None
    if trimmed.degree() <= 1:
        c = np.pad(trimmed.coef, (0, 2 - len(trimmed.coef)))
        affine = (np.array([c[1]]), float(c[0]))
    return DriftSpec(
        name=name or "polynomial",
        dim=1,
        value=value,
        gradient=gradient,
        hessian=hessian,
        third=third,
        affine=affine,
        signature=f"polynomial{list(coefs)}",
    )


def affine(a: Sequence[float], c0: float = 0.0) -> DriftSpec:
    """Affine drift ``c(y) = <a, y> + c0`` in any dimension."""
    vec = np.asarray(a, dtype=float).reshape(-1)
    dim = vec.size

    def value(y):
        return np.asarray(y, dtype=float) @ vec + c0

    def gradient(y):
        y = np.asarray(y, dtype=float)
        return np.broadcast_to(vec, y.shape).copy()

    def hessian(y):
        y = np.asarray(y, dtype=float)
        return np.zeros((*y.shape, dim))

    def third(y):
        y = np.asarray(y, dtype=float)
        return np.zeros((*y.shape, dim, dim))

    return DriftSpec(
        name="affine",
        dim=dim,
        value=value,
        gradient=gradient,
        hessian=hessian,
        third=third,
        affine=(vec, float(c0)),
        signature=f"affine{vec.tolist()}+{c0!r}",
    )


def quadratic(beta: float, omega: ArrayLike) -> DriftSpec:
    """Quadratic drift ``c(y) = -beta * y^T Omega y`` for symmetric ``Omega``."""
    om = np.atleast_2d(np.asarray(omega, dtype=float))
    if om.shape[0] != om.shape[1] or not np.allclose(om, om.T):
        raise DomainError("omega", om.tolist(), "must be a symmetric square matrix")
    dim = om.shape[0]

    def value(y):
        y = np.asarray(y, dtype=float)
        return -beta * np.einsum("...i,ij,...j->...", y, om, y)

    def gradient(y):
        return -2.0 * beta * (np.asarray(y, dtype=float) @ om)

    def hessian(y):
        y = np.asarray(y, dtype=float)
        return np.broadcast_to(-2.0 * beta * om, (*y.shape[:-1], dim, dim)).copy()

    def third(y):
        y = np.asarray(y, dtype=float)
        return np.zeros((*y.shape[:-1], dim, dim, dim))

    return DriftSpec(
        name="quadratic",
        dim=dim,
        value=value,
        gradient=gradient,
        hessian=hessian,
        third=third,
        signature=f"quadratic{beta!r}{om.tolist()}",
    )


def table1() -> DriftSpec:
    """``c(y) = 1/4 (-y^2/2 + 6y)``; its gradient vanishes only at ``y = 6``."""
    return polynomial([0.0, 1.5, -0.125], name="table1")


def photon() -> DriftSpec:
    """``c(y) = -y^2``, the reduced photon-transport drift."""
    return polynomial([0.0, 0.0, -1.0], name="photon")


PRESETS: dict[str, Callable[[], DriftSpec]] = {
    "table1": table1,
    "photon": photon,
    "affine": lambda: affine([-1.0]),
    "quadratic": lambda: quadratic(1.0, [[1.0]]),
}


def drift_from_config(cfg: DriftConfig) -> DriftSpec:
    """Build the drift a :class:`~conda_kolmogorov.models.DriftConfig` names."""
    if cfg.coefficients is not None:
        spec = polynomial(cfg.coefficients)
    elif cfg.preset in PRESETS:
        spec = PRESETS[cfg.preset]()
    else:
        raise ConfigError(
            "drift.preset",
            f"unknown preset {cfg.preset!r}; choose one of {', '.join(PRESETS)}",
        )
    return spec.with_eps_grad(cfg.eps_grad)


def h_quadratic_closed_form(
    y: ArrayLike, y_prime: ArrayLike, beta: float, omega: ArrayLike
) -> NDArray[np.float64]:
    """``H(y, y') = -beta/3 * |Omega^(1/2) (y' - y)|^2`` for the quadratic drift."""
    delta = np.asarray(y_prime, dtype=float) - np.asarray(y, dtype=float)
    om = np.atleast_2d(np.asarray(omega, dtype=float))
    return -beta / 3.0 * np.einsum("...i,ij,...j->...", delta, om, delta)


@dataclass(frozen=True)
class WarpSpec:
    """A smooth monotone scalar map ``phi`` with its inverse.

    ``lower``/``upper`` bound the open range of ``phi``.
    """

    name: str
    phi: ArrayFn
    phi_inverse: ArrayFn
    phi_inverse_derivative: ArrayFn
    lower: float = -np.inf
    upper: float = np.inf

    def check_range(self, z: ArrayLike, name: str = "z") -> NDArray[np.float64]:
        arr = np.asarray(z, dtype=float)
        if np.any((arr <= self.lower) | (arr >= self.upper)):
            raise DomainError(
                name, z, f"must lie in the range ({self.lower}, {self.upper})"
            )
        return arr

    def validate(self, points: ArrayLike | None = None) -> None:
        """Round-trip and derivative checks on sample points of the range."""
        if points is None:
            points = np.linspace(-2.0, 2.0, 9)
            if np.isfinite(self.lower):
                points = self.lower + np.exp(points)
        z = np.asarray(points, dtype=float)
        gap = np.max(np.abs(self.phi(self.phi_inverse(z)) - z))
        if gap > 1e-10 * max(1.0, float(np.max(np.abs(z)))):
            raise InvalidDriftError(
                self.name, f"phi(phi_inverse(z)) != z (gap {gap:.3g})"
            )
        h = 1e-5 * np.maximum(1.0, np.abs(z))
        if np.isfinite(self.lower):
            h = np.minimum(h, (z - self.lower) / 4)
        fd = (self.phi_inverse(z + h) - self.phi_inverse(z - h)) / (2 * h)
        rel = np.abs(fd - self.phi_inverse_derivative(z)) / np.maximum(
            1.0, np.abs(self.phi_inverse_derivative(z))
        )
        if np.any(rel > 1e-6):
            raise InvalidDriftError(
                self.name, f"inverse derivative off by {float(np.max(rel)):.3g}"
            )

    @classmethod
    def identity(cls) -> WarpSpec:
        return cls(
            name="identity",
            phi=lambda y: np.asarray(y, dtype=float),
            phi_inverse=lambda z: np.asarray(z, dtype=float),
            phi_inverse_derivative=lambda z: np.ones_like(np.asarray(z, dtype=float)),
        )

    @classmethod
    def exponential(cls) -> WarpSpec:
        return cls(
            name="exponential",
            phi=np.exp,
            phi_inverse=np.log,
            phi_inverse_derivative=lambda z: 1.0 / np.asarray(z, dtype=float),
            lower=0.0,
        )

    @classmethod
    def cubic(cls, k: float = 0.1) -> WarpSpec:
        """``phi(y) = y + k y^3``, inverted with Cardano's formula."""
        if not k > 0:
            raise DomainError("k", k, "must be > 0 for a monotone cubic warp")

        def phi(y):
            y = np.asarray(y, dtype=float)
            return y + k * y**3

        def phi_inverse(z):
            z = np.asarray(z, dtype=float)
            half = z / (2 * k)
            s = np.sqrt(half**2 + 1.0 / (27 * k**3))
            sign = np.where(z < 0, -1.0, 1.0)
            # A * B = -1/(3k) keeps the second root free of cancellation.
            big = sign * np.cbrt(np.abs(half) + s)
            return big - 1.0 / (3 * k * big)

        def phi_inverse_derivative(z):
            y = phi_inverse(z)
            return 1.0 / (1.0 + 3 * k * y**2)

        return cls(
            name=f"cubic{k!r}",
            phi=phi,
            phi_inverse=phi_inverse,
            phi_inverse_derivative=phi_inverse_derivative,
        )

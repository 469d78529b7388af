"""Iterated small-time semigroup on a bounded grid.

One step applies ``(P phi)(x, y) = int int k(dt, x, y, x', y') phi(x', y') dx' dy'``
with ``k`` one of ``pbar``, ``q`` or the exact affine kernel; ``phi`` is
continued by zero outside the grid.  The y'-integral is a trapezoid sum
over the rows within ``support_cutoff_sigmas * sqrt(dt)`` of the target
row.  The x'-integral is either exact for the band-limited interpolant of
``phi`` (``spectral``) or a trapezoid sum against the sampled kernel
(``trapezoid``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from logging import getLogger
from typing import TYPE_CHECKING

import numpy as np
from scipy.signal import fftconvolve

from . import parallel
from .closed_kernels import heat_kernel
from .exceptions import DegenerateGradientRowError, DomainError
from .models import Field, StepDiagnostics
from .smalltime import h_correction

if TYPE_CHECKING:
    from collections.abc import Iterator

    from numpy.typing import NDArray

    from .drift import DriftSpec
    from .models import Grid2D, PropagateConfig

log = getLogger(__name__)

_PAD_MARGIN = 8


def gaussian_ic(grid: Grid2D, sigma_c2: float) -> Field:
    """Centred isotropic Gaussian density of variance *sigma_c2* sampled on *grid*."""
    if not sigma_c2 > 0:
        raise DomainError("sigma_c2", sigma_c2, "must be > 0")
    xx, yy = grid.meshgrid()
    values = np.exp(-(xx**2 + yy**2) / (2 * sigma_c2)) / (2 * np.pi * sigma_c2)
    return Field(grid, values)


def _trapezoid_weights(n: int, h: float) -> NDArray[np.float64]:
    w = np.full(n, h)
    w[0] = w[-1] = h / 2
    return w


@dataclass(frozen=True)
class RowKernel:
    """The kernel seen from one target row ``y_j``.

    For source row ``l`` in ``window`` the x'-kernel is
    ``weight_l * N(x' - x - offset_l; 0, s2) * (1 + kappa_l (x' - x - offset_l))``.
    """

    row: int
    window: slice
    weight: NDArray[np.float64]
    offset: NDArray[np.float64]
    s2: float
    kappa: NDArray[np.float64]


class StepOperator:
    """One discretized step of size *dt* on a fixed grid.

    The row kernels depend only on the grid, the drift and *dt*, so an
    operator is built once and applied for every step of a propagation.
    """

    def __init__(
        self, grid: Grid2D, drift: DriftSpec, dt: float, config: PropagateConfig
    ):
        if not dt > 0:
            raise DomainError("dt", dt, "must be > 0")
        if drift.dim != 1:
            raise DomainError(
                "drift", drift.name, "propagation needs a one-dimensional drift"
            )
        if config.kernel_mode == "exact_affine" and drift.affine is None:
            raise DomainError(
                "kernel_mode", "exact_affine", f"drift {drift.name!r} is not affine"
            )
        self.grid = grid
        self.drift = drift
        self.dt = dt
        self.config = config
        self.rows = self._plan()
        self.nfft = self._fft_length()
        log.debug(
            "step operator: dt=%g, mode=%s, quadrature=%s, nfft=%d",
            dt,
            config.kernel_mode,
            config.quadrature,
            self.nfft,
        )

    def _plan(self) -> list[RowKernel]:
        grid, drift, dt = self.grid, self.drift, self.dt
        ys = grid.y
        pts = ys[:, None]
        value = drift.value(pts)
        grad = drift.gradient(pts)[:, 0]
        y_weights = _trapezoid_weights(grid.ny, grid.dy)
        reach = self.config.support_cutoff_sigmas * math.sqrt(dt)
        rows = []
        for j, yj in enumerate(ys):
            norm = abs(float(grad[j]))
            if norm <= drift.eps_grad:
                raise DegenerateGradientRowError(j, float(yj), norm, drift.eps_grad)
            lo = int(np.searchsorted(ys, yj - reach, side="left"))
            hi = int(np.searchsorted(ys, yj + reach, side="right"))
            window = slice(lo, hi)
            delta = ys[window] - yj
            offset = dt * (value[j] + 0.5 * grad[j] * delta)
            weight = y_weights[window] * heat_kernel(dt, delta[:, None])
            if self.config.kernel_mode == "pbar":
                h = h_correction(yj, ys[window], drift, self.config.quad_order)
                # pbar = q (1 - 12 (mu - x') H / (dt^2 c'^2)) and x' - mu = v
                kappa = 12.0 * h / (dt * dt * norm * norm)
            else:
                kappa = np.zeros_like(delta)
            rows.append(
                RowKernel(j, window, weight, offset, norm * norm * dt**3 / 12.0, kappa)
            )
        return rows

    def _fft_length(self) -> int:
        grid = self.grid
        width = grid.x_max - grid.x_min
        spread = max(
            float(np.max(np.abs(r.offset)))
            + min(self.config.support_cutoff_sigmas * math.sqrt(r.s2), width)
            for r in self.rows
        )
        needed = grid.nx + math.ceil(min(spread, width) / grid.dx) + _PAD_MARGIN
        return 1 << (needed - 1).bit_length()

    def __call__(self, field: Field) -> Field:
        if field.grid != self.grid:
            raise DomainError(
                "field grid", field.grid, f"operator is built for {self.grid}"
            )
        if self.config.quadrature == "spectral":
            spectrum = np.fft.rfft(field.values, n=self.nfft, axis=0)
            omega = 2 * np.pi * np.fft.rfftfreq(self.nfft, d=self.grid.dx)

            def apply_row(r: RowKernel) -> NDArray[np.float64]:
                return self._spectral_row(r, spectrum, omega)
        else:
            psi = field.values * _trapezoid_weights(self.grid.nx, self.grid.dx)[:, None]

            def apply_row(r: RowKernel) -> NDArray[np.float64]:
                return self._trapezoid_row(r, psi)

        columns = parallel.pmap(apply_row, self.rows)
        values = np.stack(columns, axis=1)
        if self.config.clamp_negative:
            values = _clamp(self.grid, values)
        return Field(self.grid, values)

    def _spectral_row(
        self,
        r: RowKernel,
        spectrum: NDArray[np.complex128],
        omega: NDArray[np.float64],
    ) -> NDArray[np.float64]:
        w = omega[:, None]
        multiplier = (
            r.weight[None, :]
            * np.exp(1j * w * r.offset[None, :] - w * w * r.s2 / 2)
            * (1.0 + 1j * r.kappa[None, :] * w * r.s2)
        )
        combined = np.sum(spectrum[:, r.window] * multiplier, axis=1)
        return np.fft.irfft(combined, n=self.nfft)[: self.grid.nx]

    def _trapezoid_row(
        self, r: RowKernel, psi: NDArray[np.float64]
    ) -> NDArray[np.float64]:
        dx, nx = self.grid.dx, self.grid.nx
        sd = math.sqrt(r.s2)
        cut = self.config.support_cutoff_sigmas * sd
        lo = math.floor(max((float(np.min(r.offset)) - cut) / dx, 1.0 - nx))
        hi = math.ceil(min((float(np.max(r.offset)) + cut) / dx, nx - 1.0))
        lo, hi = min(lo, 0), max(hi, 0)
        v = np.arange(lo, hi + 1) * dx - r.offset[:, None]
        kernel = (
            np.exp(-(v * v) / (2 * r.s2))
            / math.sqrt(2 * np.pi * r.s2)
            * (1.0 + r.kappa[:, None] * v)
            * r.weight[:, None]
        )
        kernel[np.abs(v) > cut] = 0.0
        full = fftconvolve(psi[:, r.window].T, kernel[:, ::-1], axes=1)
        # full[l, i + hi] = sum_k psi[k, l] kernel[l, k - i - lo]
        return np.sum(full[:, hi : hi + nx], axis=0)


def _clamp(grid: Grid2D, values: NDArray[np.float64]) -> NDArray[np.float64]:
    before = Field(grid, values).mass()
    clamped = np.maximum(values, 0.0)
    after = Field(grid, clamped).mass()
    if after > 0:
        clamped *= before / after
    return clamped


def step(field: Field, drift: DriftSpec, dt: float, config: PropagateConfig) -> Field:
    """Apply the discretized kernel of time *dt* to *field* once."""
    return StepOperator(field.grid, drift, dt, config)(field)


def propagate_steps(
    f: Field, drift: DriftSpec, config: PropagateConfig
) -> Iterator[tuple[int, Field, StepDiagnostics]]:
    """Yield ``(k, field_k, diagnostics)`` for ``k = 1..N``."""
    operator = StepOperator(f.grid, drift, config.dt, config)
    field = f
    for k in range(1, config.N + 1):
        field = operator(field)
        diag = StepDiagnostics(k, field.mass(), float(np.min(field.values)))
        log.info(
            "step %d/%d: mass=%.8g min=%.3g", k, config.N, diag.mass, diag.min_value
        )
        yield k, field, diag


def propagate(f: Field, drift: DriftSpec, config: PropagateConfig) -> Field:
    """``N``-fold composition of the step of size ``T / N``."""
    field = f
    for _, stepped, _ in propagate_steps(f, drift, config):
        field = stepped
    return field

"""Finite-difference reference for ``u_t = 1/2 u_yy + c(y) u_x`` on a rectangle.

Strang splitting: half a transport step in x, a Crank-Nicolson diffusion
step in y, half a transport step; consecutive half steps are merged.
Transport along row ``j`` is the shift ``u(x) -> u(x + c(y_j) tau)`` with
zero continuation outside the grid.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from logging import getLogger
from typing import TYPE_CHECKING

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import solve_banded

from .exceptions import DivergenceError, ShapeError
from .metrics import relative_lp_error
from .models import FdConfig, Field
from .propagator import gaussian_ic

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from .drift import DriftSpec
    from .models import Grid2D

log = getLogger(__name__)


def cfl_report(grid: Grid2D, drift: DriftSpec, dt: float) -> str:
    speed = float(np.max(np.abs(drift.value(grid.y[:, None]))))
    return (
        f"CFL: max|c| dt/dx = {speed * dt / grid.dx:.3g}, "
        f"dt/dy^2 = {dt / grid.dy**2:.3g}"
    )


def _spectral_phase(
    nx: int, shift: NDArray[np.float64], dx: float
) -> NDArray[np.complex128]:
    """Per-row shift factors on a zero-padded transform of length ``2 nx`` or more."""
    nfft = 1 << (2 * nx - 1).bit_length()
    omega = 2 * np.pi * np.fft.rfftfreq(nfft, d=dx)
    return np.exp(1j * omega[:, None] * shift[None, :])


def _shift_spectral(
    u: NDArray[np.float64], phase: NDArray[np.complex128]
) -> NDArray[np.float64]:
    nfft = 2 * (phase.shape[0] - 1)
    spectrum = np.fft.rfft(u, n=nfft, axis=0) * phase
    return np.fft.irfft(spectrum, n=nfft, axis=0)[: u.shape[0]]


def _lagrange_weights(theta: NDArray[np.float64]) -> NDArray[np.float64]:
    """Cubic Lagrange weights for nodes -1, 0, 1, 2 at offset *theta* in [0, 1)."""
    return np.stack(
        [
            -theta * (theta - 1) * (theta - 2) / 6,
            (theta + 1) * (theta - 1) * (theta - 2) / 2,
            -(theta + 1) * theta * (theta - 2) / 2,
            (theta + 1) * theta * (theta - 1) / 6,
        ]
    )


def _shift_semi_lagrangian(
    u: NDArray[np.float64], shift: NDArray[np.float64], dx: float
) -> NDArray[np.float64]:
    nx, ny = u.shape
    pos = shift / dx
    base = np.floor(pos).astype(int)
    weights = _lagrange_weights(pos - base)
    pad = int(np.max(np.abs(base))) + 2
    padded = np.zeros((nx + 2 * pad, ny))
    padded[pad : pad + nx] = u
    cols = np.arange(ny)
    rows = np.arange(nx)[:, None] + base[None, :] + pad
    out = np.zeros_like(u)
    for m, w in zip(range(-1, 3), weights):
        idx = np.clip(rows + m, 0, nx + 2 * pad - 1)
        out += w[None, :] * padded[idx, cols[None, :]]
    return out


def _shift_explicit(
    u: NDArray[np.float64], shift: NDArray[np.float64], dx: float, scheme: str
) -> NDArray[np.float64]:
    nu = shift / dx
    padded = np.zeros((u.shape[0] + 2, u.shape[1]))
    padded[1:-1] = u
    ahead = padded[2:] - padded[1:-1]
    behind = padded[1:-1] - padded[:-2]
    if scheme == "upwind1":
        return u + np.where(nu > 0, nu * ahead, nu * behind)
    # Lax-Wendroff
    return u + nu / 2 * (ahead + behind) + nu * nu / 2 * (ahead - behind)


class FdSolver:
    """Operator-split solver for one grid, drift and configuration."""

    def __init__(self, drift: DriftSpec, cfg: FdConfig):
        self.drift = drift
        self.cfg = cfg
        grid = cfg.grid
        self.speed = drift.value(grid.y[:, None])
        r = cfg.dt / (4 * grid.dy**2)
        n = grid.ny - 2
        self._lhs = np.zeros((3, n))
        self._lhs[0, 1:] = -r
        self._lhs[1, :] = 1 + 2 * r
        self._lhs[2, :-1] = -r
        self._r = r
        self._phases: dict[float, NDArray[np.complex128]] = {}
        self.cfl = cfl_report(grid, drift, cfg.dt)

    def transport(self, u: NDArray[np.float64], tau: float) -> NDArray[np.float64]:
        shift = self.speed * tau
        dx = self.cfg.grid.dx
        scheme = self.cfg.x_scheme
        if scheme == "spectral":
            # only tau and tau / 2 occur
            if tau not in self._phases:
                self._phases[tau] = _spectral_phase(u.shape[0], shift, dx)
            return _shift_spectral(u, self._phases[tau])
        if scheme == "semi_lagrangian":
            return _shift_semi_lagrangian(u, shift, dx)
        return _shift_explicit(u, shift, dx, scheme)

    def diffuse(self, u: NDArray[np.float64]) -> NDArray[np.float64]:
        """One Crank-Nicolson step of ``u_t = 1/2 u_yy``, all columns at once."""
        r = self._r
        rhs = (1 - 2 * r) * u[:, 1:-1] + r * (u[:, 2:] + u[:, :-2])
        out = np.zeros_like(u)
        out[:, 1:-1] = solve_banded((1, 1), self._lhs, rhs.T).T
        return out

    def solve(self, f: Field) -> Field:
        cfg = self.cfg
        grid = cfg.grid
        log.info("fd: grid %dx%d, n_t=%d, %s", grid.nx, grid.ny, cfg.n_t, self.cfl)
        u = f.values.copy()
        tau = cfg.dt
        # the exact solution obeys a maximum principle
        peak = float(np.max(np.abs(u)))
        u = self.transport(u, tau / 2)
        for k in range(cfg.n_t):
            u = self.diffuse(u)
            u = self.transport(u, tau if k < cfg.n_t - 1 else tau / 2)
            new_peak = float(np.max(np.abs(u)))
            if not math.isfinite(new_peak) or new_peak > cfg.growth_limit * peak:
                growth = new_peak / peak if peak > 0 else math.inf
                raise DivergenceError(k + 1, growth, self.cfl)
        return Field(cfg.grid, u)


def fd_solve(f: Field, drift: DriftSpec, cfg: FdConfig) -> Field:
    """Solve up to ``cfg.T`` from *f*, which must live on ``cfg.grid``."""
    if f.grid != cfg.grid:
        raise ShapeError(cfg.grid, f.grid)
    return FdSolver(drift, cfg).solve(f)


@dataclass(frozen=True)
class SelfConvergence:
    """Coarse and refined solutions; ``change`` is their relative L2 distance."""

    change: float
    coarse: Field
    fine: Field

    def point_change(self, x: float, y: float) -> float:
        """Relative change of the value at ``(x, y)``, a cubic spline along y."""
        a, b = (_value_at(field, x, y) for field in (self.coarse, self.fine))
        return abs(b - a) / abs(b) if b else math.inf


def _value_at(field: Field, x: float, y: float) -> float:
    """Nearest column in x, cubic spline in y."""
    i = int(np.argmin(np.abs(field.grid.x - x)))
    return float(CubicSpline(field.grid.y, field.values[i])(y))


def self_convergence(
    drift: DriftSpec, cfg: FdConfig, sigma_c2: float
) -> SelfConvergence:
    """Compare the Gaussian-start solution with the one for halved dx, dy and dt."""
    coarse = fd_solve(gaussian_ic(cfg.grid, sigma_c2), drift, cfg)
    fine_cfg = dataclasses.replace(cfg, grid=cfg.grid.refined(), n_t=2 * cfg.n_t)
    fine = fd_solve(gaussian_ic(fine_cfg.grid, sigma_c2), drift, fine_cfg)
    change = relative_lp_error(fine.restrict_to(cfg.grid), coarse, 2)
    log.info("fd self-convergence: relative L2 change %.3g", change)
    return SelfConvergence(change, coarse, fine)

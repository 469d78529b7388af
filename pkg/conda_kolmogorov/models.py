"""Model dataclasses for conda-kolmogorov."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np
from scipy.integrate import trapezoid

from .exceptions import DomainError, ShapeError

if TYPE_CHECKING:
    from typing import Literal

    from numpy.typing import NDArray

    from .drift import DriftSpec

    KernelMode = Literal["pbar", "q", "exact_affine"]
    Quadrature = Literal["spectral", "trapezoid"]
    XScheme = Literal["spectral", "semi_lagrangian", "upwind1", "centered2"]
    OUSign = Literal["statement", "proof"]


@dataclass(frozen=True)
class Grid2D:
    """Uniform tensor-product grid over ``(x_min, x_max) x (y_min, y_max)``.

    Node ``(i, j)`` sits at ``(x_min + i*dx, y_min + j*dy)``.
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int
    ny: int

    def __post_init__(self) -> None:
        if self.nx < 3 or self.ny < 3:
            raise DomainError("grid size", (self.nx, self.ny), "nx and ny must be >= 3")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise DomainError(
                "grid bounds",
                (self.x_min, self.x_max, self.y_min, self.y_max),
                "need x_min < x_max and y_min < y_max",
            )

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dy(self) -> float:
        return (self.y_max - self.y_min) / (self.ny - 1)

    @property
    def x(self) -> NDArray[np.float64]:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def y(self) -> NDArray[np.float64]:
        return np.linspace(self.y_min, self.y_max, self.ny)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    def refined(self) -> Grid2D:
        """The grid with both spacings halved; every node of *self* is kept."""
        return Grid2D(
            self.x_min,
            self.x_max,
            self.y_min,
            self.y_max,
            2 * self.nx - 1,
            2 * self.ny - 1,
        )

    def refined_y(self) -> Grid2D:
        """The grid with only the y spacing halved."""
        return replace(self, ny=2 * self.ny - 1)

    def meshgrid(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return np.meshgrid(self.x, self.y, indexing="ij")


@dataclass
class Field:
    """Real values on a :class:`Grid2D`, shaped ``(nx, ny)``."""

    grid: Grid2D
    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ShapeError(self.grid.shape, self.values.shape)
        if not np.all(np.isfinite(self.values)):
            raise DomainError("field values", "non-finite", "all values must be finite")

    def mass(self) -> float:
        """Trapezoid integral over the grid."""
        inner = trapezoid(self.values, dx=self.grid.dy, axis=1)
        return float(trapezoid(inner, dx=self.grid.dx))

    def restrict_to(self, coarse: Grid2D) -> Field:
        """Subsample onto a coarser grid whose nodes are a subset of ours."""
        sx = (self.grid.nx - 1) // (coarse.nx - 1)
        sy = (self.grid.ny - 1) // (coarse.ny - 1)
        nested = (
            sx * (coarse.nx - 1) == self.grid.nx - 1
            and sy * (coarse.ny - 1) == self.grid.ny - 1
            and math.isclose(self.grid.x_min, coarse.x_min)
            and math.isclose(self.grid.x_max, coarse.x_max)
            and math.isclose(self.grid.y_min, coarse.y_min)
            and math.isclose(self.grid.y_max, coarse.y_max)
        )
        if not nested:
            raise ShapeError(f"a grid nesting {coarse}", self.grid)
        return Field(coarse, self.values[::sx, ::sy].copy())

    def cut_at_y(self, y: float) -> NDArray[np.float64]:
        """Values along the horizontal line at height *y* (linear in y)."""
        if not self.grid.y_min <= y <= self.grid.y_max:
            raise DomainError("y", y, "line cut must lie inside the grid")
        pos = (y - self.grid.y_min) / self.grid.dy
        j = min(int(math.floor(pos)), self.grid.ny - 2)
        theta = pos - j
        return (1.0 - theta) * self.values[:, j] + theta * self.values[:, j + 1]


@dataclass(frozen=True)
class LinearPotentialParams:
    """Linear potential ``V(y) = <a, y>`` with complex coupling *alpha*."""

    a: tuple[float, ...]
    alpha: complex = 1.0


@dataclass(frozen=True)
class QuadraticPotentialParams:
    """Quadratic potential ``V(y) = 1/2 sum rho_i y_i^2`` in the eigenbasis."""

    rho: tuple[float, ...]
    alpha: complex = -1.0

    def __post_init__(self) -> None:
        if any(r == 0 for r in self.rho):
            raise DomainError("rho", self.rho, "every eigenvalue must be nonzero")


@dataclass(frozen=True)
class OUParams:
    """Linear potential ``V(y) = y`` along an Ornstein-Uhlenbeck path.

    *sign* selects the sign in front of the ``tanh`` exponent: ``statement``
    (``+``) or ``proof`` (``-``).
    """

    zeta: float
    alpha: complex = 1.0
    sign: OUSign = "statement"

    def __post_init__(self) -> None:
        if not self.zeta > 0:
            raise DomainError("zeta", self.zeta, "must be > 0")
        if self.sign not in ("statement", "proof"):
            raise DomainError("sign", self.sign, "must be 'statement' or 'proof'")


@dataclass(frozen=True)
class FourierInversionConfig:
    """Controls the FFT inversion of a characteristic function in the x-gap.

    ``gamma_max`` defaults to ``200 / t``; it is doubled until the transform
    at the boundary falls below ``tail_tol`` (relative to its value at 0).
    """

    gamma_max: float | None = None
    n_points: int = 2**14
    tail_tol: float = 1e-10
    max_doublings: int = 12
    max_points: int = 2**22


@dataclass(frozen=True)
class PropagateConfig:
    """Iterated-semigroup settings: ``N`` steps of size ``T / N``."""

    T: float = 2.5
    N: int = 5
    kernel_mode: KernelMode = "pbar"
    clamp_negative: bool = False
    support_cutoff_sigmas: float = 8.0
    quadrature: Quadrature = "spectral"
    quad_order: int = 32

    def __post_init__(self) -> None:
        if not self.T > 0:
            raise DomainError("T", self.T, "must be > 0")
        if self.N < 1:
            raise DomainError("N", self.N, "must be >= 1")
        if self.kernel_mode not in ("pbar", "q", "exact_affine"):
            raise DomainError(
                "kernel_mode", self.kernel_mode, "pbar, q or exact_affine"
            )
        if self.quadrature not in ("spectral", "trapezoid"):
            raise DomainError("quadrature", self.quadrature, "spectral or trapezoid")
        if not self.support_cutoff_sigmas > 0:
            raise DomainError(
                "support_cutoff_sigmas", self.support_cutoff_sigmas, "must be > 0"
            )

    @property
    def dt(self) -> float:
        return self.T / self.N


@dataclass(frozen=True)
class StepDiagnostics:
    """Mass and minimum of the field after one propagation step."""

    step: int
    mass: float
    min_value: float


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo budget: Euler steps, sample count, seed and batching."""

    n_steps: int = 1000
    n_samples: int = 100_000
    seed: int = 0
    antithetic: bool = False
    batch_size: int = 4096
    bridge_steps: int = 1024

    def __post_init__(self) -> None:
        if self.n_steps < 1 or self.n_samples < 1 or self.batch_size < 1:
            raise DomainError(
                "McConfig",
                (self.n_steps, self.n_samples, self.batch_size),
                "n_steps, n_samples and batch_size must be >= 1",
            )
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed", self.seed, "must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with its standard error ``std / sqrt(n_effective)``."""

    mean: float | complex
    std_error: float
    n_effective: int

    def deviation(self, value: float | complex) -> float:
        """Distance to *value* in standard errors (``inf`` when SE is 0)."""
        gap = abs(self.mean - value)
        if self.std_error == 0:
            return 0.0 if gap == 0 else math.inf
        return gap / self.std_error


@dataclass(frozen=True)
class FdConfig:
    """Finite-difference reference settings.

    ``x_scheme`` picks the transport substep: ``spectral`` (exact shift of
    the band-limited interpolant), ``semi_lagrangian`` (cubic Lagrange shift),
    ``upwind1`` or ``centered2`` (Lax-Wendroff).
    """

    grid: Grid2D
    T: float = 2.5
    n_t: int = 2000
    splitting: Literal["strang"] = "strang"
    x_scheme: XScheme = "spectral"
    boundary: Literal["dirichlet_zero"] = "dirichlet_zero"
    growth_limit: float = 10.0

    def __post_init__(self) -> None:
        if not self.T > 0 or self.n_t < 1:
            raise DomainError("FdConfig", (self.T, self.n_t), "need T > 0 and n_t >= 1")
        if self.x_scheme not in ("spectral", "semi_lagrangian", "upwind1", "centered2"):
            raise DomainError("x_scheme", self.x_scheme, "unknown transport scheme")
        if self.splitting != "strang" or self.boundary != "dirichlet_zero":
            raise DomainError(
                "FdConfig",
                (self.splitting, self.boundary),
                "only strang / dirichlet_zero",
            )

    @property
    def dt(self) -> float:
        return self.T / self.n_t


@dataclass(frozen=True)
class ErrorReport:
    """Relative L1/L2/Linf errors of one approximation against a reference."""

    l1: float
    l2: float
    linf: float
    scenario: str
    n_iterations: int
    reference: str


@dataclass(frozen=True)
class DriftConfig:
    """Drift selection: a named preset or inline polynomial coefficients."""

    preset: str | None = "table1"
    coefficients: tuple[float, ...] | None = None
    eps_grad: float = 1e-8


@dataclass(frozen=True)
class Table1Config:
    """Which iteration counts and artifacts the table1 benchmark produces."""

    iterations: tuple[int, ...] = (1, 5)
    line_cut: bool = True
    line_cut_y: float = 3.74
    line_cut_mc: bool = True
    line_cut_stride: int = 10
    figures: bool = True

    def __post_init__(self) -> None:
        if not self.iterations or min(self.iterations) < 1:
            raise DomainError(
                "iterations", self.iterations, "needs at least one count >= 1"
            )
        if self.line_cut_stride < 1:
            raise DomainError("line_cut_stride", self.line_cut_stride, "must be >= 1")


@dataclass(frozen=True)
class RateConfig:
    """Small-time convergence check of the approximated kernel."""

    times: tuple[float, ...] = (0.4, 0.2, 0.1, 0.05)
    x: float = 0.0
    y: float = 3.0
    reference: Literal["exact", "mc"] = "exact"

    def __post_init__(self) -> None:
        if len(self.times) < 2 or min(self.times) <= 0:
            raise DomainError("times", self.times, "needs at least two positive times")
        if self.reference not in ("exact", "mc"):
            raise DomainError("reference", self.reference, "exact or mc")


def _default_grid() -> Grid2D:
    return Grid2D(-14.0, 14.0, -5.0, 5.0, 281, 101)


def fd_grid_for(grid: Grid2D) -> Grid2D:
    """Default reference grid: *grid* refined once in x and twice in y.

    The y spacing dominates the reference error in the tails of the solution.
    """
    return grid.refined().refined_y()


def _default_fd() -> FdConfig:
    return FdConfig(grid=fd_grid_for(_default_grid()))


@dataclass(frozen=True)
class RunConfig:
    """A complete, schema-validated run description.

    Defaults reproduce the table1 benchmark.
    """

    schema_version: int = 1
    scenario: str = "table1"
    output: str = "results/{{ scenario }}"
    drift: DriftConfig = field(default_factory=DriftConfig)
    sigma_c2: float = 0.2
    grid: Grid2D = field(default_factory=_default_grid)
    propagate: PropagateConfig = field(default_factory=PropagateConfig)
    mc: McConfig = field(default_factory=McConfig)
    fd: FdConfig = field(default_factory=_default_fd)
    table1: Table1Config = field(default_factory=Table1Config)
    rate: RateConfig = field(default_factory=RateConfig)

    @cached_property
    def drift_spec(self) -> DriftSpec:
        """The :class:`~conda_kolmogorov.drift.DriftSpec` this config selects."""
        from .drift import drift_from_config

        return drift_from_config(self.drift)

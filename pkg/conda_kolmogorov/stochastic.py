"""Monte Carlo references.

Every estimator splits its samples into batches of ``McConfig.batch_size``.
Batch ``b`` draws from :func:`~conda_kolmogorov.rng.batch_generator` and is
reduced with its neighbours in batch order, so estimates are bit-identical
for a given seed whatever the thread count.  Samplers take ``(gen, n, sign)``
and multiply every normal draw by ``sign``; antithetic runs call the sampler
twice on identical streams with ``sign = +1`` and ``-1`` and average pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from logging import getLogger
from typing import TYPE_CHECKING

import numpy as np
from scipy.integrate import trapezoid

from . import parallel
from .closed_kernels import heat_kernel, ou_density, ou_potential_kernel
from .drift import affine
from .exceptions import DomainError, SingularityError
from .models import (
    LinearPotentialParams,
    McEstimate,
    OUParams,
    QuadraticPotentialParams,
)
from .rng import FORWARD_STREAM, PILOT_STREAM, REVERSED_STREAM, batch_generator

if TYPE_CHECKING:
    from collections.abc import Callable

    from numpy.typing import ArrayLike, NDArray

    from .drift import DriftSpec, WarpSpec
    from .models import McConfig

    Payoff = Callable[[NDArray[np.float64], NDArray[np.float64]], NDArray]
    Sampler = Callable[[np.random.Generator, int, float], NDArray]

log = getLogger(__name__)


# -- batched reduction -----------------------------------------------------------


@dataclass
class _Moments:
    """Count, mean and summed squared deviation ``sum |v - mean|^2``."""

    n: int
    mean: NDArray
    m2: NDArray[np.float64]

    @classmethod
    def of(cls, values: NDArray) -> _Moments:
        mean = values.mean(axis=0)
        return cls(values.shape[0], mean, np.sum(np.abs(values - mean) ** 2, axis=0))

    def merge(self, other: _Moments) -> _Moments:
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.n / n)
        m2 = self.m2 + other.m2 + np.abs(delta) ** 2 * (self.n * other.n / n)
        return _Moments(n, mean, m2)

    def std_error(self) -> NDArray[np.float64]:
        if self.n < 2:
            return np.zeros_like(self.m2)
        return np.sqrt(self.m2 / (self.n - 1)) / math.sqrt(self.n)


def _batch_sizes(n_samples: int, batch_size: int) -> list[int]:
    full, rest = divmod(n_samples, batch_size)
    return [batch_size] * full + ([rest] if rest else [])


def run_batches(
    sampler: Sampler, cfg: McConfig, stream: int = FORWARD_STREAM
) -> _Moments:
    """Evaluate *sampler* over all batches and reduce in batch order.

    With ``cfg.antithetic`` each batch of ``n`` draws yields ``n // 2``
    pair averages (at least one).
    """
    sizes = _batch_sizes(cfg.n_samples, cfg.batch_size)

    def one_batch(index: int) -> _Moments:
        n = sizes[index]
        if not cfg.antithetic:
            values = sampler(batch_generator(cfg.seed, index, stream), n, 1.0)
        else:
            pairs = max(n // 2, 1)
            plus = sampler(batch_generator(cfg.seed, index, stream), pairs, 1.0)
            minus = sampler(batch_generator(cfg.seed, index, stream), pairs, -1.0)
            values = (plus + minus) / 2
        return _Moments.of(np.asarray(values))

    parts = parallel.pmap(one_batch, range(len(sizes)))
    total = parts[0]
    for part in parts[1:]:
        total = total.merge(part)
    return total


def _scalar(value) -> float | complex:
    value = np.asarray(value).item()
    return value if isinstance(value, complex) else float(value)


def _estimate(moments: _Moments, scale: float = 1.0) -> McEstimate:
    return McEstimate(
        _scalar(moments.mean * scale),
        float(moments.std_error() * abs(scale)),
        moments.n,
    )


def _estimates(moments: _Moments) -> list[McEstimate]:
    se = moments.std_error()
    return [
        McEstimate(_scalar(m), float(s), moments.n)
        for m, s in zip(np.ravel(moments.mean), np.ravel(se))
    ]


# -- payoffs ---------------------------------------------------------------------


def gaussian_payoff(sigma_c2: float) -> Payoff:
    """The centred isotropic Gaussian density used as initial condition."""

    def payoff(x, y):
        return np.exp(-(x * x + y * y) / (2 * sigma_c2)) / (2 * np.pi * sigma_c2)

    return payoff


def characteristic_payoff(u: float, v: float) -> Payoff:
    """``exp(i (u x + v y))``."""

    def payoff(x, y):
        return np.exp(1j * (u * x + v * y))

    return payoff


# -- Feynman-Kac estimates of u(T, x, y) -------------------------------------------


def _advance(
    gen: np.random.Generator,
    xs: NDArray[np.float64],
    ys: NDArray[np.float64],
    drift: DriftSpec,
    T: float,
    n_steps: int,
    sign: float,
    *,
    ou_zeta: float | None = None,
    reverse: bool = False,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Move ``(X, Y)`` forward by *T*: exact Y increments, left-endpoint X sums."""
    dt = T / n_steps
    sign_x = -1.0 if reverse else 1.0
    if ou_zeta is None:
        decay, noise = 1.0, math.sqrt(dt)
    else:
        decay = math.exp(-ou_zeta * dt)
        noise = math.sqrt(-math.expm1(-2 * ou_zeta * dt) / (2 * ou_zeta))
    xs = np.array(xs, dtype=float)
    ys = np.array(ys, dtype=float)
    n = xs.shape[0]
    for _ in range(n_steps):
        xs += sign_x * drift.value(ys[:, None]) * dt
        ys = decay * ys + noise * sign * gen.standard_normal(n)
    return xs, ys


def estimate_u(
    T: float,
    x: float,
    y: float,
    f: Payoff,
    drift: DriftSpec,
    cfg: McConfig,
    *,
    ou_zeta: float | None = None,
) -> McEstimate:
    """``E^{x,y}[f(X_T, Y_T)]`` for ``dX = c(Y) dt, dY = dW``.

    With *ou_zeta* the y-dynamics become ``dY = dW - zeta Y dt`` (sampled
    exactly).
    """
    if not T > 0:
        raise DomainError("T", T, "time must be > 0")

    def sample(gen, n, sign):
        start = np.full(n, float(x)), np.full(n, float(y))
        return f(*_advance(gen, *start, drift, T, cfg.n_steps, sign, ou_zeta=ou_zeta))

    moments = run_batches(sample, cfg)
    log.debug("estimate_u: T=%g (x, y)=(%g, %g) n=%d", T, x, y, moments.n)
    return _estimate(moments)


def estimate_ou_khe(
    T: float, x: float, y: float, f: Payoff, zeta: float, cfg: McConfig
) -> McEstimate:
    """``E[f(X_T, Y_T)]`` for ``dX = -Y dt, dY = dW - zeta Y dt``."""
    if not zeta > 0:
        raise DomainError("zeta", zeta, "must be > 0")
    return estimate_u(T, x, y, f, affine([-1.0]), cfg, ou_zeta=zeta)


def characteristic_function_mc(
    T: float,
    x: float,
    y: float,
    frequencies: ArrayLike,
    drift: DriftSpec,
    cfg: McConfig,
    *,
    ou_zeta: float | None = None,
    warp: WarpSpec | None = None,
) -> list[McEstimate]:
    """``E[exp(i (u X_T + v Z_T))]`` for every ``(u, v)`` row of *frequencies*.

    ``Z_T`` is ``Y_T``, or ``phi(Y_T)`` when a *warp* is given.  All
    frequencies share one set of paths.
    """
    if not T > 0:
        raise DomainError("T", T, "time must be > 0")
    freqs = np.atleast_2d(np.asarray(frequencies, dtype=float))

    def sample(gen, n, sign):
        start = np.full(n, float(x)), np.full(n, float(y))
        xs, ys = _advance(gen, *start, drift, T, cfg.n_steps, sign, ou_zeta=ou_zeta)
        zs = ys if warp is None else warp.phi(ys)
        arg = xs[:, None] * freqs[None, :, 0] + zs[:, None] * freqs[None, :, 1]
        return np.exp(1j * arg)

    return _estimates(run_batches(sample, cfg))


# -- bridge functionals ------------------------------------------------------------


def bridge_functional(
    t: float,
    y: ArrayLike,
    z: ArrayLike,
    params: LinearPotentialParams | QuadraticPotentialParams,
    cfg: McConfig,
) -> McEstimate:
    """``E[exp(alpha int_0^t V(y + W_s) ds) | W_t = z - y] p_t(z - y)``.

    Bridges are sampled on ``cfg.bridge_steps`` uniform steps by the
    conditioned-Gaussian recursion; the integral is the trapezoid rule.
    """
    if not t > 0:
        raise DomainError("t", t, "time must be > 0")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    alpha = complex(params.alpha)
    if isinstance(params, LinearPotentialParams):
        a = np.asarray(params.a, dtype=float)

        def potential(path):
            return path @ a
    else:
        rho = np.asarray(params.rho, dtype=float)

        def potential(path):
            return 0.5 * (path * path) @ rho

    if y.shape != z.shape:
        raise DomainError("z", z.tolist(), f"must have the shape of y {y.shape}")
    d = y.size
    m = cfg.bridge_steps
    h = t / m
    if alpha.imag == 0:
        alpha = alpha.real

    def sample(gen, n, sign):
        path = np.broadcast_to(y, (n, d)).copy()
        integral = 0.5 * h * potential(path)
        for k in range(m - 1):
            remaining = t - k * h
            path += (z - path) * (h / remaining)
            step_sd = math.sqrt(h * (remaining - h) / remaining)
            path += step_sd * sign * gen.standard_normal((n, d))
            integral += h * potential(path)
        integral += 0.5 * h * potential(np.broadcast_to(z, (n, d)))
        return np.exp(alpha * integral)

    scale = float(heat_kernel(t, z - y))
    return _estimate(run_batches(sample, cfg), scale)


@dataclass(frozen=True)
class KlBridgeResult:
    """Estimate of ``E[exp(lambda int_0^1 b^2)]`` next to the truncated product."""

    estimate: McEstimate
    truncated_product: complex


def truncated_weierstrass_product(
    lam: complex, k_max: int, *, pole_tol: float = 1e-12
) -> complex:
    """``prod_{k <= k_max} (1 - 2 lambda / (pi k)^2)^(-1/2)``."""
    if k_max < 1:
        raise DomainError("k_max", k_max, "must be >= 1")
    k = np.arange(1, k_max + 1, dtype=float)
    factors = 1.0 - 2.0 * complex(lam) / (np.pi * k) ** 2
    if np.any(np.abs(factors) < pole_tol):
        raise SingularityError(2 * complex(lam), pole_tol)
    return complex(np.exp(-0.5 * np.sum(np.log(factors))))


def kl_bridge_functional(lam: complex, k_max: int, cfg: McConfig) -> KlBridgeResult:
    """Karhunen-Loeve estimate with ``int_0^1 b^2 = sum_k z_k^2 / (k pi)^2``."""
    product = truncated_weierstrass_product(lam, k_max)
    lam = complex(lam)
    if lam.real >= np.pi**2 / 2:
        raise DomainError(
            "lambda", lam, "the expectation is infinite for Re(lambda) >= pi^2/2"
        )
    if lam.imag == 0:
        lam = lam.real
    inv_k2 = 1.0 / (np.pi * np.arange(1, k_max + 1, dtype=float)) ** 2
    chunk = 256

    def sample(gen, n, sign):
        energy = np.zeros(n)
        for start in range(0, k_max, chunk):
            weights = inv_k2[start : start + chunk]
            draws = sign * gen.standard_normal((n, weights.size))
            energy += (draws * draws) @ weights
        return np.exp(lam * energy)

    return KlBridgeResult(_estimate(run_batches(sample, cfg)), product)


# -- Ornstein-Uhlenbeck ------------------------------------------------------------


def ou_joint_samples(
    gen: np.random.Generator,
    n: int,
    t: float,
    y: float,
    zeta: float,
    steps: int,
    sign: float = 1.0,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Exact AR(1) OU paths from *y*; returns ``(int_0^t Y ds, Y_t)``.

    The time integral uses the trapezoid rule over *steps* intervals.
    """
    h = t / steps
    decay = math.exp(-zeta * h)
    noise = math.sqrt(-math.expm1(-2 * zeta * h) / (2 * zeta))
    path = np.full(n, float(y))
    integral = 0.5 * h * path
    for _ in range(steps):
        path = decay * path + noise * sign * gen.standard_normal(n)
        integral += h * path
    integral -= 0.5 * h * path
    return integral, path


def _check_ou_args(t: float, zeta: float) -> None:
    if not t > 0:
        raise DomainError("t", t, "time must be > 0")
    if not zeta > 0:
        raise DomainError("zeta", zeta, "must be > 0")


def ou_covariance_estimate(
    t: float, y: float, zeta: float, cfg: McConfig
) -> McEstimate:
    """``Cov(int_0^t Y, Y_t)`` estimated with the exact means subtracted.

    The exact value is ``(1 - e^{-zeta t})^2 / (2 zeta^2)``.
    """
    _check_ou_args(t, zeta)
    mean_z = y * -math.expm1(-zeta * t) / zeta
    mean_y = y * math.exp(-zeta * t)

    def sample(gen, n, sign):
        z_int, y_end = ou_joint_samples(gen, n, t, y, zeta, cfg.bridge_steps, sign)
        return (z_int - mean_z) * (y_end - mean_y)

    return _estimate(run_batches(sample, cfg))


def ou_bridge_oracle(
    t: float, y: float, z: float, zeta: float, alpha: complex, cfg: McConfig
) -> McEstimate:
    """``E^y[exp(alpha int_0^t Y) | Y_t = z] * p^OU_t(y, z)`` from pinned exact paths.

    A free path is pinned through ``Y(s) + k(s) (z - Y(t))`` with
    ``k(s) = Cov(Y_s, Y_t) / Var(Y_t)``, so the integral gains
    ``(z - Y_t) int_0^t k``.
    """
    _check_ou_args(t, zeta)
    s = np.linspace(0.0, t, cfg.bridge_steps + 1)
    gain = (
        np.exp(-zeta * (t - s))
        * -np.expm1(-2 * zeta * s)
        / -math.expm1(-2 * zeta * t)
    )
    gain_integral = float(trapezoid(gain, s))
    alpha = complex(alpha)
    if alpha.imag == 0:
        alpha = alpha.real

    def sample(gen, n, sign):
        z_int, y_end = ou_joint_samples(gen, n, t, y, zeta, cfg.bridge_steps, sign)
        return np.exp(alpha * (z_int + (z - y_end) * gain_integral))

    scale = float(ou_density(t, y, z, zeta))
    return _estimate(run_batches(sample, cfg), scale)


@dataclass(frozen=True)
class OuSignArbitration:
    """Which sign of the OU potential kernel the bridge oracle supports."""

    estimate: McEstimate
    statement: complex
    proof: complex
    selected: str | None


def arbitrate_ou_sign(
    t: float,
    y: float,
    z: float,
    zeta: float,
    alpha: complex,
    cfg: McConfig,
    *,
    accept: float = 3.0,
    reject: float = 5.0,
) -> OuSignArbitration:
    """Pick the sign variant within *accept* SE when the other is beyond *reject* SE."""
    estimate = ou_bridge_oracle(t, y, z, zeta, alpha, cfg)
    values = {
        sign: complex(ou_potential_kernel(t, y, z, OUParams(zeta, alpha, sign)))
        for sign in ("statement", "proof")
    }
    deviations = {sign: estimate.deviation(v) for sign, v in values.items()}
    selected = None
    for sign, other in (("statement", "proof"), ("proof", "statement")):
        if deviations[sign] <= accept and deviations[other] >= reject:
            selected = sign
    log.info(
        "OU sign arbitration: statement %.2f SE, proof %.2f SE -> %s",
        deviations["statement"],
        deviations["proof"],
        selected,
    )
    return OuSignArbitration(estimate, values["statement"], values["proof"], selected)


# -- kernels as distributions --------------------------------------------------------


def kernel_characteristic_function(
    values: ArrayLike,
    x: ArrayLike,
    y: ArrayLike,
    u: ArrayLike,
    v: ArrayLike,
) -> NDArray[np.complex128]:
    """``int int exp(i (u x' + v y')) k(x', y') dx' dy'`` by the trapezoid rule.

    *values* is shaped ``(len(x), len(y))``; the result ``(len(u), len(v))``.
    """
    values = np.asarray(values, dtype=float)
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    u, v = np.atleast_1d(u).astype(float), np.atleast_1d(v).astype(float)
    phase_x = np.exp(1j * u[:, None] * x[None, :])
    inner = trapezoid(phase_x[:, :, None] * values[None, :, :], x, axis=1)
    phase_y = np.exp(1j * v[:, None] * y[None, :])
    return trapezoid(inner[:, None, :] * phase_y[None, :, :], y, axis=-1)


@dataclass(frozen=True)
class ReversedDriftReport:
    """Forward and reversed-drift estimates of the same characteristic functions."""

    frequencies: NDArray[np.float64]
    forward: list[McEstimate]
    reversed: list[McEstimate]
    deviations: NDArray[np.float64]

    @property
    def max_deviation(self) -> float:
        return float(np.max(self.deviations))


def reversed_drift_check(
    t: float,
    drift: DriftSpec,
    cfg: McConfig,
    *,
    start_variance: float = 0.2,
    frequencies: ArrayLike | None = None,
    pilot_samples: int = 20_000,
) -> ReversedDriftReport:
    """Check ``p*(t, x', y', x, y) = p(t, x, y, x', y')`` on characteristic functions.

    With starts ``(x, y) ~ mu = N(0, start_variance I)`` the forward side
    estimates ``E_mu[g(X_t, Y_t)]``.  The reversed side draws ``(x', y')``
    from a Gaussian ``nu`` fitted to pilot forward samples (covariance
    doubled), runs ``dX = -c(Y) dt`` and averages
    ``g(x', y') mu(X_t, Y_t) / nu(x', y')``.
    """
    if not t > 0:
        raise DomainError("t", t, "time must be > 0")
    if frequencies is None:
        grid = np.linspace(-1.0, 1.0, 5)
        frequencies = np.array([(a, b) for a in grid for b in grid])
    freqs = np.atleast_2d(np.asarray(frequencies, dtype=float))
    sd = math.sqrt(start_variance)

    def start_mu(gen, n):
        draws = gen.standard_normal((n, 2)) * sd
        return draws[:, 0], draws[:, 1]

    def mu_density(xs, ys):
        norm = 2 * np.pi * start_variance
        return np.exp(-(xs * xs + ys * ys) / (2 * start_variance)) / norm

    def forward_paths(gen, n, sign):
        x0, y0 = start_mu(gen, n)
        return _advance(gen, x0, y0, drift, t, cfg.n_steps, sign)

    pilot_gen = batch_generator(cfg.seed, 0, PILOT_STREAM)
    pilot_x, pilot_y = forward_paths(pilot_gen, pilot_samples, 1.0)
    center = np.array([pilot_x.mean(), pilot_y.mean()])
    cov = 2.0 * np.cov(np.stack([pilot_x, pilot_y]))
    chol = np.linalg.cholesky(cov)
    cov_inv = np.linalg.inv(cov)
    norm = 1.0 / (2 * np.pi * math.sqrt(np.linalg.det(cov)))

    def nu_density(xs, ys):
        d = np.stack([xs, ys], axis=-1) - center
        return norm * np.exp(-0.5 * np.einsum("ni,ij,nj->n", d, cov_inv, d))

    def phases(xs, ys):
        arg = xs[:, None] * freqs[None, :, 0] + ys[:, None] * freqs[None, :, 1]
        return np.exp(1j * arg)

    def forward(gen, n, sign):
        return phases(*forward_paths(gen, n, sign))

    def reversed_(gen, n, sign):
        # antithetic signs flip the path noise only; both members share the start
        starts = center + gen.standard_normal((n, 2)) @ chol.T
        x0, y0 = starts[:, 0], starts[:, 1]
        xs, ys = _advance(gen, x0, y0, drift, t, cfg.n_steps, sign, reverse=True)
        weight = mu_density(xs, ys) / nu_density(x0, y0)
        return phases(x0, y0) * weight[:, None]

    fwd = run_batches(forward, cfg, FORWARD_STREAM)
    rev = run_batches(reversed_, cfg, REVERSED_STREAM)
    gap = np.abs(fwd.mean - rev.mean)
    se = np.sqrt(fwd.std_error() ** 2 + rev.std_error() ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        deviations = np.where(se > 0, gap / se, np.where(gap > 0, np.inf, 0.0))
    report = ReversedDriftReport(freqs, _estimates(fwd), _estimates(rev), deviations)
    log.info("reversed-drift check: max deviation %.2f SE", report.max_deviation)
    return report

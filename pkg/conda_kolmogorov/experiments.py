"""The table1 benchmark, its y = 3.74 line cut and the small-time rate check.

Each experiment returns a plain dataclass; writing CSV and SVG artifacts is
left to the command-line handlers.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from logging import getLogger
from typing import TYPE_CHECKING

import numpy as np

from .cache import fd_fingerprint, has_field, load_field, save_field
from .closed_kernels import gaussian_expectation
from .fd_reference import fd_solve
from .metrics import error_report
from .propagator import gaussian_ic, propagate
from .smalltime import apply_kernel_at_point
from .stochastic import estimate_u, gaussian_payoff

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from .models import ErrorReport, FdConfig, Field, McEstimate, RunConfig

log = getLogger(__name__)

FD_REFERENCE = "fd"


def _fd_setup(config: RunConfig) -> tuple[FdConfig, dict]:
    fd_cfg = dataclasses.replace(config.fd, T=config.propagate.T)
    return fd_cfg, fd_fingerprint(config.drift_spec, fd_cfg, config.sigma_c2)


def reference_is_cached(config: RunConfig) -> bool:
    return has_field(_fd_setup(config)[1])


def fd_reference(config: RunConfig, *, use_cache: bool = True) -> Field:
    """Finite-difference solution on ``config.fd.grid`` at ``config.propagate.T``.

    The horizon always follows the propagation so both sides compare the
    same time.  Solutions are cached by input fingerprint.
    """
    drift = config.drift_spec
    fd_cfg, fingerprint = _fd_setup(config)
    if use_cache:
        cached = load_field(fingerprint)
        if cached is not None:
            return cached
    solution = fd_solve(gaussian_ic(fd_cfg.grid, config.sigma_c2), drift, fd_cfg)
    if use_cache:
        save_field(fingerprint, solution)
    return solution


@dataclass(frozen=True)
class LineCut:
    """Every field cut along one ``y`` row, plus optional Monte Carlo points."""

    y: float
    x: NDArray[np.float64]
    reference: NDArray[np.float64]
    approximations: dict[int, NDArray[np.float64]]
    mc_x: NDArray[np.float64]
    mc: list[McEstimate]


@dataclass(frozen=True)
class Table1Result:
    reports: list[ErrorReport]
    reference: Field
    fields: dict[int, Field]
    line_cut: LineCut | None


def line_cut(
    config: RunConfig, reference: Field, fields: dict[int, Field]
) -> LineCut:
    """Cut *reference* and every propagated field at ``config.table1.line_cut_y``."""
    settings = config.table1
    y = settings.line_cut_y
    x = config.grid.x
    mc_x = x[:: settings.line_cut_stride] if settings.line_cut_mc else x[:0]
    payoff = gaussian_payoff(config.sigma_c2)
    drift, T = config.drift_spec, config.propagate.T
    mc = [estimate_u(T, float(xi), y, payoff, drift, config.mc) for xi in mc_x]
    return LineCut(
        y=y,
        x=x,
        reference=reference.cut_at_y(y),
        approximations={n: f.cut_at_y(y) for n, f in fields.items()},
        mc_x=mc_x,
        mc=mc,
    )


def run_table1(config: RunConfig, *, use_cache: bool = True) -> Table1Result:
    """Relative L1, L2 and Linf errors of the iterated semigroup against FD.

    The FD reference lives on ``config.fd.grid`` and is restricted to the
    propagation grid before comparison.
    """
    drift = config.drift_spec
    reference = fd_reference(config, use_cache=use_cache).restrict_to(config.grid)
    initial = gaussian_ic(config.grid, config.sigma_c2)
    fields: dict[int, Field] = {}
    reports: list[ErrorReport] = []
    for n in config.table1.iterations:
        settings = dataclasses.replace(config.propagate, N=n)
        fields[n] = propagate(initial, drift, settings)
        report = error_report(fields[n], reference, config.scenario, n, FD_REFERENCE)
        log.info(
            "table1 N=%d: l1=%.6g l2=%.6g linf=%.6g",
            n,
            report.l1,
            report.l2,
            report.linf,
        )
        reports.append(report)
    cut = line_cut(config, reference, fields) if config.table1.line_cut else None
    return Table1Result(reports, reference, fields, cut)


@dataclass(frozen=True)
class RateResult:
    """Errors of ``pbar`` (and of the frozen kernel ``q``) against the exact value."""

    times: tuple[float, ...]
    exact: tuple[float, ...]
    exact_std_error: tuple[float, ...]
    pbar: tuple[float, ...]
    q: tuple[float, ...]
    slope: float
    q_slope: float

    @property
    def pbar_errors(self) -> NDArray[np.float64]:
        return np.abs(np.asarray(self.pbar) - np.asarray(self.exact))

    @property
    def q_errors(self) -> NDArray[np.float64]:
        return np.abs(np.asarray(self.q) - np.asarray(self.exact))


def _loglog_slope(times: tuple[float, ...], errors: NDArray[np.float64]) -> float:
    floor = np.maximum(errors, np.finfo(float).tiny)
    return float(np.polyfit(np.log(times), np.log(floor), 1)[0])


def rate_check(config: RunConfig) -> RateResult:
    """``|P_t f - Pbar_t f|`` at one point over decreasing times.

    With ``reference = "exact"`` the true value comes from
    :func:`~conda_kolmogorov.closed_kernels.gaussian_expectation` (quadratic
    drifts only); ``"mc"`` uses a Feynman-Kac estimate instead.
    """
    settings = config.rate
    drift = config.drift_spec
    payoff = gaussian_payoff(config.sigma_c2)
    x, y = settings.x, settings.y
    exact, exact_se, pbar, q = [], [], [], []
    for t in settings.times:
        if settings.reference == "exact":
            exact.append(gaussian_expectation(t, x, y, drift, config.sigma_c2))
            exact_se.append(0.0)
        else:
            estimate = estimate_u(t, x, y, payoff, drift, config.mc)
            exact.append(float(estimate.mean.real))
            exact_se.append(estimate.std_error)
        pbar.append(apply_kernel_at_point(t, x, y, payoff, drift, "pbar"))
        q.append(apply_kernel_at_point(t, x, y, payoff, drift, "q"))
        log.info(
            "rate t=%g: exact=%.10g pbar=%.10g q=%.10g", t, exact[-1], pbar[-1], q[-1]
        )
    times = tuple(settings.times)
    result = RateResult(
        times=times,
        exact=tuple(exact),
        exact_std_error=tuple(exact_se),
        pbar=tuple(pbar),
        q=tuple(q),
        slope=math.nan,
        q_slope=math.nan,
    )
    return dataclasses.replace(
        result,
        slope=_loglog_slope(times, result.pbar_errors),
        q_slope=_loglog_slope(times, result.q_errors),
    )

"""Handler for ``conda kolmogorov kernel``."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from ..closed_kernels import (
    heat_kernel,
    linear_khe_kernel,
    linear_potential_kernel,
    oscillator_factor,
    ou_khe_kernel,
    ou_potential_kernel,
    quad_khe_density,
    quad_khe_kernel,
    quadratic_potential_kernel,
)
from ..drift import WarpSpec
from ..exceptions import DomainError
from ..io import write_field_csv
from ..models import Field, LinearPotentialParams, OUParams, QuadraticPotentialParams
from ..smalltime import frozen_kernel_q, pbar_kernel, warped_pbar_kernel
from .common import Session, emit_json

if TYPE_CHECKING:
    import argparse

    from numpy.typing import NDArray

ARITY = {
    "heat": 1,
    "oscillator": 1,
    "linear-potential": 2,
    "quadratic-potential": 2,
    "ou-potential": 2,
}
WARPS = {
    "identity": WarpSpec.identity,
    "exponential": WarpSpec.exponential,
    "cubic": WarpSpec.cubic,
}


def _alpha(args: argparse.Namespace, default: complex) -> complex:
    return default if args.alpha is None else args.alpha


def evaluate(
    family: str,
    args: argparse.Namespace,
    session: Session,
    point: tuple[float, ...] | tuple[NDArray, ...],
) -> NDArray:
    """Kernel values for one point (or for broadcast coordinate arrays)."""
    t = args.time
    if family == "heat":
        (z,) = point
        return heat_kernel(t, np.asarray(z)[..., None])
    if family == "oscillator":
        (w,) = point
        return oscillator_factor(w)
    if family == "linear-potential":
        y, z = point
        return linear_potential_kernel(
            t, [y], [z], LinearPotentialParams((args.a,), _alpha(args, 1.0))
        )
    if family == "quadratic-potential":
        y, z = point
        return quadratic_potential_kernel(
            t, [y], [z], QuadraticPotentialParams((args.rho,), _alpha(args, -1.0))
        )
    if family == "ou-potential":
        y, z = point
        params = OUParams(args.zeta, _alpha(args, 1.0), args.sign)
        return ou_potential_kernel(t, y, z, params)

    x, y, x_prime, y_prime = point
    if family == "linear-khe":
        y_vec = np.asarray(y)[..., None]
        y_prime_vec = np.asarray(y_prime)[..., None]
        return linear_khe_kernel(t, x, y_vec, x_prime, y_prime_vec, [args.a])
    if family == "quad-khe":
        return quad_khe_kernel(t, x, y, x_prime, y_prime, [args.rho])
    if family == "ou-khe":
        return ou_khe_kernel(t, x, y, x_prime, y_prime, args.zeta)
    drift = session.config.drift_spec
    if family == "frozen":
        return frozen_kernel_q(t, x, y, x_prime, y_prime, drift)
    if family == "pbar":
        return pbar_kernel(t, x, y, x_prime, y_prime, drift)
    return warped_pbar_kernel(t, x, y, x_prime, y_prime, drift, WARPS[args.warp]())


def _tabulate(args: argparse.Namespace, session: Session) -> Field:
    """The kernel from ``--start`` over every ``(x', y')`` node of the config grid."""
    grid = session.config.grid
    x, y = args.start
    family = args.family
    if family in ARITY:
        raise DomainError(
            "family", family, "grid tabulation needs a hypoelliptic kernel"
        )
    if family == "quad-khe":
        # one Fourier inversion per y' row
        rows = []
        for y_prime in grid.y:
            xi, density = quad_khe_density(
                args.time, y, y_prime, [args.rho], gaps=grid.x - x
            )
            rows.append(np.interp(grid.x - x, xi, density, left=0.0, right=0.0))
        return Field(grid, np.stack(rows, axis=1))
    if family in ("pbar", "warped-pbar"):
        # H depends on y' only; evaluate row by row
        rows = []
        for y_prime in grid.y:
            row = evaluate(family, args, session, (x, y, grid.x, y_prime))
            rows.append(np.broadcast_to(row, grid.x.shape))
        return Field(grid, np.stack(rows, axis=1))
    xx, yy = grid.meshgrid()
    values = evaluate(family, args, session, (x, y, xx, yy))
    return Field(grid, np.asarray(values, dtype=float))


def _format(value: complex) -> str:
    value = complex(value)
    return repr(value.real) if value.imag == 0 else repr(value)


def execute_kernel(args: argparse.Namespace) -> int:
    """Execute the ``conda kolmogorov kernel`` subcommand."""
    session = Session("kernel", args)
    family = args.family

    if args.point is None:
        with session.timed("tabulate"):
            field = _tabulate(args, session)
        path = session.out / f"field_kernel_{family}.csv"
        session.wrote(write_field_csv(field, path))
        session.write_manifest()
        if session.json:
            emit_json({"family": family, "t": args.time, "mass": field.mass()})
        return 0

    arity = ARITY.get(family, 4)
    results = []
    for point in args.point:
        if len(point) != arity:
            raise DomainError("--point", point, f"{family} takes {arity} coordinate(s)")
        value = evaluate(family, args, session, tuple(point))
        value = complex(np.asarray(value).item())
        results.append((tuple(point), value))

    if session.json:
        emit_json(
            {
                "family": family,
                "t": args.time,
                "values": [
                    {"point": list(p), "real": v.real, "imag": v.imag}
                    for p, v in results
                ],
            }
        )
        return 0
    for p, v in results:
        coords = " ".join(repr(c) for c in p)
        print(f"{family}(t={args.time!r}; {coords}) = {_format(v)}")
    return 0

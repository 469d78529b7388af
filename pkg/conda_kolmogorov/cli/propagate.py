"""Handler for ``conda kolmogorov propagate``."""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING

from ..io import write_field_csv
from ..propagator import gaussian_ic, propagate_steps
from .common import Session, emit_json

if TYPE_CHECKING:
    import argparse


def execute_propagate(args: argparse.Namespace) -> int:
    """Execute the ``conda kolmogorov propagate`` subcommand."""
    session = Session("propagate", args)
    config = session.config
    settings = config.propagate
    if args.steps is not None:
        settings = dataclasses.replace(settings, N=args.steps)
    if args.kernel_mode is not None:
        settings = dataclasses.replace(settings, kernel_mode=args.kernel_mode)

    initial = gaussian_ic(config.grid, config.sigma_c2)
    grid = config.grid
    session.status(
        "run",
        f"{settings.kernel_mode} x {settings.N} steps of {settings.dt:g} "
        f"on a {grid.nx}x{grid.ny} grid",
    )
    diagnostics = []
    field = initial
    with session.timed("propagate"):
        for k, field, diag in propagate_steps(initial, config.drift_spec, settings):
            diagnostics.append(diag)
            session.status(
                "run", f"step {k}: mass={diag.mass:.8g} min={diag.min_value:.3g}"
            )

    session.wrote(write_field_csv(initial, session.out / "field_initial.csv"))
    name = f"field_{settings.kernel_mode}_n{settings.N}.csv"
    session.wrote(write_field_csv(field, session.out / name))
    session.write_manifest()

    if session.json:
        emit_json(
            {
                "kernel_mode": settings.kernel_mode,
                "N": settings.N,
                "T": settings.T,
                "steps": [dataclasses.asdict(d) for d in diagnostics],
                "outputs": [str(p) for p in session.written],
            }
        )
    return 0

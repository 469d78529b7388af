"""Handler for ``conda kolmogorov fd``."""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING

from ..experiments import fd_reference, reference_is_cached
from ..fd_reference import cfl_report, self_convergence
from ..io import write_field_csv
from .common import Session, emit_json

if TYPE_CHECKING:
    import argparse


def execute_fd(args: argparse.Namespace) -> int:
    """Execute the ``conda kolmogorov fd`` subcommand."""
    session = Session("fd", args)
    config = session.config
    fd_cfg = dataclasses.replace(config.fd, T=config.propagate.T)
    grid = fd_cfg.grid

    if session.use_cache and reference_is_cached(config):
        what = f"reference for T={fd_cfg.T:g} on {grid.nx}x{grid.ny}"
        session.status("cached", what)
    else:
        session.status("run", cfl_report(grid, config.drift_spec, fd_cfg.dt))
    with session.timed("fd"):
        solution = fd_reference(config, use_cache=session.use_cache)
    session.wrote(write_field_csv(solution, session.out / "field_fd.csv"))

    payload: dict[str, object] = {"T": fd_cfg.T, "mass": solution.mass()}
    if args.self_convergence:
        with session.timed("self-convergence"):
            result = self_convergence(config.drift_spec, fd_cfg, config.sigma_c2)
        change = f"relative L2 change under refinement: {result.change:.3g}"
        session.status("run", change)
        refined = session.out / "field_fd_refined.csv"
        session.wrote(write_field_csv(result.fine, refined))
        payload["self_convergence"] = result.change
    session.write_manifest()

    if session.json:
        payload["outputs"] = [str(p) for p in session.written]
        emit_json(payload)
    return 0

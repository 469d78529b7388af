"""Handler for ``conda kolmogorov rate``."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from ..experiments import rate_check
from ..figures import Series, lines_svg, write_svg
from ..io import write_rate_csv
from .common import Session, emit_json

if TYPE_CHECKING:
    import argparse


def execute_rate(args: argparse.Namespace) -> int:
    """Execute the ``conda kolmogorov rate`` subcommand."""
    session = Session("rate", args)
    config = session.config
    with session.timed("rate"):
        result = rate_check(config)

    for t, err in zip(result.times, result.pbar_errors):
        session.status("run", f"t={t:g}: |P f - Pbar f| = {err:.3g}")
    session.status(
        "run",
        f"log-log slope {result.slope:.3f} (frozen kernel {result.q_slope:.3f})",
    )
    session.wrote(write_rate_csv(result, session.out / "rate.csv"))
    if config.table1.figures:
        floor = np.finfo(float).tiny
        log_t = np.log(result.times)
        svg = lines_svg(
            [
                Series("log error pbar", log_t, np.log(result.pbar_errors + floor)),
                Series("log error q", log_t, np.log(result.q_errors + floor)),
            ],
            "small-time error",
            x_label="log t",
        )
        session.wrote(write_svg(svg, session.out / "figures" / "rate.svg"))
    session.write_manifest()

    if session.json:
        emit_json(
            {
                "times": list(result.times),
                "pbar_errors": result.pbar_errors.tolist(),
                "q_errors": result.q_errors.tolist(),
                "slope": result.slope,
                "q_slope": result.q_slope,
            }
        )
    return 0

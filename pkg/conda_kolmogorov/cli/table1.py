"""Handler for ``conda kolmogorov table1``."""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING

from ..experiments import reference_is_cached, run_table1
from ..figures import Series, heatmap_svg, lines_svg, write_svg
from ..io import write_field_csv, write_line_cut_csv, write_reports_csv
from .common import Session, emit_json

if TYPE_CHECKING:
    import argparse
    from pathlib import Path

    from ..experiments import Table1Result


def write_figures(result: Table1Result, out: Path, session: Session) -> None:
    """Heatmaps of the reference and of every propagated field, plus the cut."""
    figures = out / "figures"
    svg = heatmap_svg(result.reference, "finite-difference reference")
    session.wrote(write_svg(svg, figures / "fd.svg"))
    for n, field in result.fields.items():
        svg = heatmap_svg(field, f"iterated kernel, N = {n}")
        session.wrote(write_svg(svg, figures / f"pbar_n{n}.svg"))
    cut = result.line_cut
    if cut is None:
        return
    series = [Series("FD", cut.x, cut.reference)]
    for n, values in cut.approximations.items():
        series.append(Series(f"N = {n}", cut.x, values))
    if cut.mc:
        series.append(Series("MC", cut.mc_x, [float(e.mean.real) for e in cut.mc]))
    svg = lines_svg(series, f"cut at y = {cut.y:g}")
    session.wrote(write_svg(svg, figures / "line_cut.svg"))


def execute_table1(args: argparse.Namespace) -> int:
    """Execute the ``conda kolmogorov table1`` subcommand."""
    session = Session("table1", args)
    config = session.config

    if session.use_cache and reference_is_cached(config):
        session.status("cached", "finite-difference reference")
    else:
        session.status("run", "finite-difference reference (this is the slow part)")
    with session.timed("table1"):
        result = run_table1(config, use_cache=session.use_cache)

    out = session.out
    for report in result.reports:
        session.status(
            "run",
            f"N={report.n_iterations}: l1={report.l1:.6g} l2={report.l2:.6g} "
            f"linf={report.linf:.6g}",
        )
    session.wrote(write_reports_csv(result.reports, out / "errors.csv"))
    session.wrote(write_field_csv(result.reference, out / "field_fd.csv"))
    for n, field in result.fields.items():
        session.wrote(write_field_csv(field, out / f"field_pbar_n{n}.csv"))
    if result.line_cut is not None:
        session.wrote(write_line_cut_csv(result.line_cut, out / "line_cut.csv"))
    if config.table1.figures:
        with session.timed("figures"):
            write_figures(result, out, session)
    session.write_manifest()

    if session.json:
        emit_json(
            {
                "reports": [dataclasses.asdict(r) for r in result.reports],
                "outputs": [str(p) for p in session.written],
            }
        )
    return 0

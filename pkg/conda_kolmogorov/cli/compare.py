"""Handler for ``conda kolmogorov compare``."""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING

from ..io import read_field_csv, write_reports_csv
from ..metrics import error_report
from .common import Session, emit_json

if TYPE_CHECKING:
    import argparse


def execute_compare(args: argparse.Namespace) -> int:
    """Execute the ``conda kolmogorov compare`` subcommand.

    The reference is restricted to the approximation's grid when it was
    written on a refinement of it.
    """
    session = Session("compare", args)
    approx = read_field_csv(args.approx)
    reference = read_field_csv(args.reference)
    if reference.grid != approx.grid:
        reference = reference.restrict_to(approx.grid)

    report = error_report(
        approx, reference, args.scenario, args.iterations, args.reference.stem
    )
    session.status(
        "run", f"l1={report.l1:.6g} l2={report.l2:.6g} linf={report.linf:.6g}"
    )
    session.wrote(write_reports_csv([report], session.out / "errors.csv"))
    session.write_manifest()

    if session.json:
        emit_json(dataclasses.asdict(report))
    return 0

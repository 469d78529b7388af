"""CSV serialization of fields, error reports and Monte Carlo estimates."""

from __future__ import annotations

import csv
from typing import TYPE_CHECKING

import numpy as np

from .exceptions import ShapeError
from .models import ErrorReport, Field, Grid2D, McEstimate

if TYPE_CHECKING:
    from collections.abc import Iterable
    from pathlib import Path

    from .experiments import LineCut, RateResult

FIELD_HEADER = ("x", "y", "value")
REPORT_HEADER = ("scenario", "n_iterations", "reference", "l1", "l2", "linf")
ESTIMATE_HEADER = ("quantity", "mean", "std_error", "n")
RATE_HEADER = ("t", "exact", "exact_std_error", "pbar", "q", "pbar_error", "q_error")


def _float(value: float) -> str:
    """Shortest text that reads back to the same double."""
    return repr(float(value))


def _number(value: float | complex) -> str:
    if isinstance(value, complex):
        return repr(complex(value))
    return _float(value)


def write_field_csv(field: Field, path: Path) -> Path:
    """One row per node, y in the outer loop, 17 significant digits."""
    grid = field.grid
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(FIELD_HEADER)
        for j, y in enumerate(grid.y):
            for i, x in enumerate(grid.x):
                value = field.values[i, j]
                writer.writerow((f"{x:.17g}", f"{y:.17g}", f"{value:.17g}"))
    return path


def read_field_csv(path: Path) -> Field:
    """Inverse of :func:`write_field_csv`; the grid is recovered from the nodes."""
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != FIELD_HEADER:
            raise ShapeError(",".join(FIELD_HEADER), ",".join(header))
        rows = np.array([[float(v) for v in row] for row in reader])
    xs = np.unique(rows[:, 0])
    ys = np.unique(rows[:, 1])
    if rows.shape[0] != xs.size * ys.size:
        raise ShapeError(f"{xs.size}x{ys.size} nodes", f"{rows.shape[0]} rows")
    grid = Grid2D(
        float(xs[0]), float(xs[-1]), float(ys[0]), float(ys[-1]), xs.size, ys.size
    )
    return Field(grid, rows[:, 2].reshape(ys.size, xs.size).T)


def write_reports_csv(reports: Iterable[ErrorReport], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_HEADER)
        for r in reports:
            errors = (_float(r.l1), _float(r.l2), _float(r.linf))
            writer.writerow((r.scenario, r.n_iterations, r.reference, *errors))
    return path


def read_reports_csv(path: Path) -> list[ErrorReport]:
    with path.open(newline="", encoding="utf-8") as fh:
        return [
            ErrorReport(
                l1=float(row["l1"]),
                l2=float(row["l2"]),
                linf=float(row["linf"]),
                scenario=row["scenario"],
                n_iterations=int(row["n_iterations"]),
                reference=row["reference"],
            )
            for row in csv.DictReader(fh)
        ]


def write_estimates_csv(estimates: dict[str, McEstimate], path: Path) -> Path:
    """Complex means are written with :func:`repr`, read back with :func:`complex`."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(ESTIMATE_HEADER)
        for name, est in estimates.items():
            writer.writerow(
                (name, _number(est.mean), _float(est.std_error), est.n_effective)
            )
    return path


def read_estimates_csv(path: Path) -> dict[str, McEstimate]:
    result: dict[str, McEstimate] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            text = row["mean"]
            mean = complex(text) if "j" in text else float(text)
            std_error, n = float(row["std_error"]), int(row["n"])
            result[row["quantity"]] = McEstimate(mean, std_error, n)
    return result


def write_line_cut_csv(cut: LineCut, path: Path) -> Path:
    """Columns ``x, fd, mc, mc_std_error, pbar_n<N>...``.

    MC cells are empty off the sampling stride.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    sampled = {float(x): est for x, est in zip(cut.mc_x, cut.mc)}
    iterations = sorted(cut.approximations)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ("x", "fd", "mc", "mc_std_error", *(f"pbar_n{n}" for n in iterations))
        )
        for i, x in enumerate(cut.x):
            est = sampled.get(float(x))
            mc = ("", "")
            if est is not None:
                mc = (_number(est.mean), _float(est.std_error))
            writer.writerow(
                (
                    _float(x),
                    _float(cut.reference[i]),
                    *mc,
                    *(_float(cut.approximations[n][i]) for n in iterations),
                )
            )
    return path


def write_rate_csv(result: RateResult, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RATE_HEADER)
        rows = zip(
            result.times,
            result.exact,
            result.exact_std_error,
            result.pbar,
            result.q,
            result.pbar_errors,
            result.q_errors,
        )
        for row in rows:
            writer.writerow(tuple(_float(v) for v in row))
    return path

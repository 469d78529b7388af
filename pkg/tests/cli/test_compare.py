"""Tests for ``conda kolmogorov compare``."""

from __future__ import annotations

import csv

import pytest

from conda_kolmogorov.cli import generate_parser
from conda_kolmogorov.cli.compare import execute_compare
from conda_kolmogorov.exceptions import ConfigFileNotFoundError
from conda_kolmogorov.io import write_field_csv
from conda_kolmogorov.models import Field, Grid2D
from conda_kolmogorov.propagator import gaussian_ic

GRID = Grid2D(-3.0, 3.0, -2.0, 2.0, 25, 17)


@pytest.fixture
def fields(tmp_path):
    reference = gaussian_ic(GRID.refined(), 0.5)
    approx = gaussian_ic(GRID, 0.5)
    approx = Field(GRID, approx.values * 1.01)
    return (
        write_field_csv(approx, tmp_path / "approx.csv"),
        write_field_csv(reference, tmp_path / "reference.csv"),
    )


def test_restricts_refined_reference(parse, out_dir, fields, capsys):
    approx, reference = fields
    args = parse(
        "compare", str(approx), str(reference), "--scenario", "s", "--iterations", "3"
    )
    assert execute_compare(args) == 0
    assert "  [run] l1=0.01 l2=0.01 linf=0.01" in capsys.readouterr().out

    with (out_dir / "errors.csv").open(newline="") as fh:
        (row,) = list(csv.DictReader(fh))
    assert row["scenario"] == "s"
    assert row["n_iterations"] == "3"
    assert row["reference"] == "reference"
    assert float(row["l2"]) == pytest.approx(0.01)


def test_json_report(parse, fields, captured_json):
    execute_compare(parse("compare", *map(str, fields), "--json"))
    (payload,) = captured_json
    assert payload["scenario"] == "compare"
    assert payload["linf"] == pytest.approx(0.01)


def test_missing_config(fields, tmp_path):
    args = generate_parser().parse_args(
        ["compare", *map(str, fields), "--config", str(tmp_path / "nope.toml")]
    )
    with pytest.raises(ConfigFileNotFoundError):
        execute_compare(args)

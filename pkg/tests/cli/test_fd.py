"""Tests for ``conda kolmogorov fd``."""

from __future__ import annotations

import numpy as np
import pytest

from conda_kolmogorov.cli.fd import execute_fd
from conda_kolmogorov.io import read_field_csv


def test_solves_then_reuses_cache(parse, out_dir, capsys):
    assert execute_fd(parse("fd")) == 0
    first = capsys.readouterr().out
    assert "  [run] CFL: " in first
    field = read_field_csv(out_dir / "field_fd.csv")
    assert (field.grid.nx, field.grid.ny) == (97, 129)

    execute_fd(parse("fd"))
    second = capsys.readouterr().out
    assert "  [cached] reference for T=0.5 on 97x129" in second
    again = read_field_csv(out_dir / "field_fd.csv")
    np.testing.assert_array_equal(again.values, field.values)


def test_no_cache_recomputes(parse, capsys):
    execute_fd(parse("fd"))
    capsys.readouterr()
    execute_fd(parse("fd", "--no-cache"))
    assert "[cached]" not in capsys.readouterr().out


@pytest.mark.slow
def test_self_convergence(parse, out_dir, captured_json):
    execute_fd(parse("fd", "--self-convergence", "--json"))
    (payload,) = captured_json
    assert 0 < payload["self_convergence"] < 0.1
    assert payload["T"] == 0.5
    assert (out_dir / "field_fd_refined.csv").is_file()

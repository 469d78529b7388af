"""Fixtures for the subcommand handler tests."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from conda_kolmogorov.cli import generate_parser

if TYPE_CHECKING:
    import argparse
    from collections.abc import Callable
    from pathlib import Path


@pytest.fixture
def out_dir(tmp_path: Path) -> Path:
    return tmp_path / "results"


@pytest.fixture
def parse(
    sample_config: Path, out_dir: Path
) -> Callable[..., argparse.Namespace]:
    """Parse ``argv`` with the small sample configuration and *out_dir*."""

    def _parse(*argv: str) -> argparse.Namespace:
        common = ["--config", str(sample_config), "--out", str(out_dir)]
        return generate_parser().parse_args([*argv, *common])

    return _parse


@pytest.fixture
def captured_json(monkeypatch: pytest.MonkeyPatch) -> list[dict]:
    """Collect the payloads handed to ``emit_json`` by any handler."""
    payloads: list[dict] = []
    for name in (
        "kernel",
        "propagate",
        "mc",
        "fd",
        "compare",
        "table1",
        "rate",
        "selftest",
    ):
        monkeypatch.setattr(
            f"conda_kolmogorov.cli.{name}.emit_json", payloads.append
        )
    return payloads

"""Shared plumbing for the subcommand handlers: config, output, manifest."""

from __future__ import annotations

import dataclasses
import logging
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import TYPE_CHECKING

import tomlkit

from .. import parallel
from ..config import detect_and_load, run_config_to_toml
from ..context import RunContext
from ..template import render

if TYPE_CHECKING:
    import argparse

    from ..models import RunConfig

QUICK_SAMPLES = 20_000
QUICK_STEPS = 250
MANIFEST_NAME = "run_manifest.toml"


def configure_logging(args: argparse.Namespace) -> None:
    """``-v`` shows this package's INFO records, ``-vv`` its DEBUG records."""
    # conda stores the -v count as ``verbosity``, with a falsy NULL default
    verbose = getattr(args, "verbosity", None) or getattr(args, "verbose", 0)
    if not isinstance(verbose, int) or verbose < 1:
        return
    logger = logging.getLogger("conda_kolmogorov")
    logger.setLevel(logging.DEBUG if verbose > 1 else logging.INFO)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        logger.addHandler(handler)


def apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    """Fold ``--seed`` and ``--quick`` into *config*."""
    mc = config.mc
    if getattr(args, "seed", None) is not None:
        mc = dataclasses.replace(mc, seed=args.seed)
    if getattr(args, "quick", False):
        mc = dataclasses.replace(
            mc,
            n_samples=min(mc.n_samples, QUICK_SAMPLES),
            n_steps=min(mc.n_steps, QUICK_STEPS),
            bridge_steps=min(mc.bridge_steps, QUICK_STEPS),
        )
    return dataclasses.replace(config, mc=mc)


class Session:
    """One CLI invocation: resolved config, output directory and timings."""

    def __init__(self, command: str, args: argparse.Namespace):
        configure_logging(args)
        if getattr(args, "threads", None) is not None:
            parallel.set_max_workers(args.threads)
        self.command = command
        self.args = args
        self.config_path, config = detect_and_load(getattr(args, "config", None))
        self.config = apply_overrides(config, args)
        self.quiet = bool(getattr(args, "quiet", False))
        self.json = bool(getattr(args, "json", False))
        self.use_cache = not getattr(args, "no_cache", False)
        self.started = datetime.now(timezone.utc)
        self.timings: dict[str, float] = {}
        self.written: list[Path] = []
        self._out: Path | None = None

    @property
    def out(self) -> Path:
        """``--out`` or the rendered ``output`` template, created on first use."""
        if self._out is None:
            out = getattr(self.args, "out", None)
            if out is None:
                out = Path(
                    render(
                        self.config.output,
                        {"scenario": self.config.scenario, "seed": self.config.mc.seed},
                    )
                )
            out.mkdir(parents=True, exist_ok=True)
            self._out = out
        return self._out

    def status(self, tag: str, message: str) -> None:
        if not (self.quiet or self.json):
            print(f"  [{tag}] {message}")

    def timed(self, label: str):
        """Context manager recording the wall time of a phase under *label*."""
        return _Timer(self, label)

    def wrote(self, path: Path) -> Path:
        self.written.append(path)
        self.status("wrote", str(path))
        return path

    def write_manifest(self) -> Path:
        """Write ``run_manifest.toml``: command, config echo, versions, timings."""
        doc = tomlkit.document()
        run = tomlkit.table()
        run.add("command", self.command)
        run.add("started", self.started.isoformat(timespec="seconds"))
        run.add("config-file", str(self.config_path) if self.config_path else "")
        run.add("outputs", sorted(p.name for p in self.written))
        doc.add("run", run)
        doc.add("versions", tomlkit.item(RunContext().versions()))
        timings = {k: round(v, 3) for k, v in self.timings.items()}
        doc.add("timings", tomlkit.item(timings))
        echo = tomlkit.parse(run_config_to_toml(self.config)).unwrap()
        doc.add("config", tomlkit.item(echo))
        path = self.out / MANIFEST_NAME
        path.write_text(tomlkit.dumps(doc), encoding="utf-8")
        self.status("wrote", str(path))
        return path


class _Timer:
    def __init__(self, session: Session, label: str):
        self.session = session
        self.label = label

    def __enter__(self) -> _Timer:
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc: object) -> None:
        self.session.timings[self.label] = time.perf_counter() - self.start


def emit_json(payload: dict[str, object]) -> None:
    from conda.common.io import stdout_json

    stdout_json(payload)

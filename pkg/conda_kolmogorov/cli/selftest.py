"""Handler for ``conda kolmogorov selftest``."""

from __future__ import annotations

import dataclasses
from typing import TYPE_CHECKING

from ..exceptions import OracleFailureError
from ..selftest import iter_selftest
from .common import Session, emit_json

if TYPE_CHECKING:
    import argparse


def execute_selftest(args: argparse.Namespace) -> int:
    """Execute the ``conda kolmogorov selftest`` subcommand.

    ``--quick`` runs the oracles that finish in seconds; the default runs
    the full suite including the acceptance experiments.
    """
    session = Session("selftest", args)
    seed = session.config.mc.seed
    results = []
    for result in iter_selftest(quick=args.quick, seed=seed):
        results.append(result)
        session.timings[result.name] = result.seconds
        tag = "pass" if result.passed else "fail"
        session.status(tag, f"{result.name}: {result.detail}")

    passed = sum(r.passed for r in results)
    session.status("run", f"{passed}/{len(results)} oracles passed (seed {seed})")
    if session.json:
        emit_json(
            {
                "seed": seed,
                "quick": args.quick,
                "results": [dataclasses.asdict(r) for r in results],
            }
        )

    failed = [r.name for r in results if not r.passed]
    if failed:
        raise OracleFailureError(failed)
    return 0

"""Handler for ``conda kolmogorov mc``."""

from __future__ import annotations

from typing import TYPE_CHECKING

from ..io import write_estimates_csv
from ..stochastic import estimate_ou_khe, estimate_u, gaussian_payoff
from .common import Session, emit_json

if TYPE_CHECKING:
    import argparse

    from ..models import McEstimate

DEFAULT_POINT = (0.0, 3.0)


def execute_mc(args: argparse.Namespace) -> int:
    """Execute the ``conda kolmogorov mc`` subcommand."""
    session = Session("mc", args)
    config = session.config
    T = config.propagate.T
    payoff = gaussian_payoff(config.sigma_c2)
    points = args.point or [DEFAULT_POINT]

    estimates: dict[str, McEstimate] = {}
    with session.timed("mc"):
        for x, y in points:
            if args.zeta is None:
                estimate = estimate_u(T, x, y, payoff, config.drift_spec, config.mc)
            else:
                estimate = estimate_ou_khe(T, x, y, payoff, args.zeta, config.mc)
            name = f"u({T:g},{x:g},{y:g})"
            estimates[name] = estimate
            summary = f"{estimate.mean:.8g} +- {estimate.std_error:.2g}"
            session.status("run", f"{name} = {summary}")

    session.wrote(write_estimates_csv(estimates, session.out / "mc_estimates.csv"))
    session.write_manifest()

    if session.json:
        emit_json(
            {
                "T": T,
                "seed": config.mc.seed,
                "estimates": [
                    {
                        "quantity": name,
                        "mean": float(est.mean.real),
                        "std_error": est.std_error,
                        "n": est.n_effective,
                    }
                    for name, est in estimates.items()
                ],
            }
        )
    return 0

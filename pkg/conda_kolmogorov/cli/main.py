"""CLI for ``conda kolmogorov`` -- argparse configuration and dispatch."""

from __future__ import annotations

import argparse
from pathlib import Path

from conda.cli.helpers import add_output_and_prompt_options, add_parser_help

KERNEL_FAMILIES = (
    "heat",
    "linear-potential",
    "quadratic-potential",
    "ou-potential",
    "oscillator",
    "linear-khe",
    "quad-khe",
    "ou-khe",
    "frozen",
    "pbar",
    "warped-pbar",
)


def generate_parser() -> argparse.ArgumentParser:
    """Build and return the parser -- used by sphinxarg.ext for docs."""
    parser = argparse.ArgumentParser(
        prog="conda kolmogorov",
        description=(
            "Evaluate, propagate and validate fundamental solutions of "
            "Kolmogorov hypoelliptic equations."
        ),
        add_help=False,
    )
    configure_parser(parser)
    return parser


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    """Options every subcommand shares."""
    add_parser_help(parser)
    add_output_and_prompt_options(parser)
    parser.add_argument(
        "--config",
        type=Path,
        default=None,
        help="Path to a run configuration instead of auto-detection.",
    )
    parser.add_argument(
        "--out",
        type=Path,
        default=None,
        help="Output directory (default: the rendered 'output' config value).",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Monte Carlo seed (unsigned 64-bit), overrides mc.seed.",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="Cap on worker threads; results do not depend on it.",
    )
    parser.add_argument(
        "--quick",
        action="store_true",
        default=False,
        help="Smaller Monte Carlo budgets (and the quick oracle subset for selftest).",
    )
    parser.add_argument(
        "--no-cache",
        action="store_true",
        default=False,
        help="Recompute finite-difference references instead of using the cache.",
    )


def configure_parser(parser: argparse.ArgumentParser) -> None:
    """Set up ``conda kolmogorov`` CLI with subcommands."""
    add_parser_help(parser)

    sub = parser.add_subparsers(dest="subcmd")

    kernel_parser = sub.add_parser(
        "kernel", help="Evaluate a closed-form or approximated kernel.", add_help=False
    )
    _add_run_options(kernel_parser)
    kernel_parser.add_argument(
        "family", choices=KERNEL_FAMILIES, help="Kernel to evaluate."
    )
    kernel_parser.add_argument(
        "-t", "--time", type=float, default=1.0, help="Time t > 0."
    )
    kernel_parser.add_argument(
        "--point",
        type=float,
        nargs="+",
        action="append",
        default=None,
        metavar="COORD",
        help=(
            "Evaluation point, repeatable: 'z' for heat, 'w' for oscillator, "
            "'y z' for the potential kernels, 'x y x1 y1' for the others. "
            "Without --point the kernel is tabulated over the config grid."
        ),
    )
    kernel_parser.add_argument(
        "--start",
        type=float,
        nargs=2,
        default=(0.0, 0.0),
        metavar=("X", "Y"),
        help="Starting point for grid tabulation.",
    )
    kernel_parser.add_argument(
        "--a", type=float, default=1.0, help="Linear coefficient a."
    )
    kernel_parser.add_argument(
        "--alpha", type=complex, default=None, help="Coupling alpha."
    )
    kernel_parser.add_argument(
        "--rho", type=float, default=1.0, help="Quadratic coefficient rho."
    )
    kernel_parser.add_argument(
        "--zeta", type=float, default=1.0, help="OU mean reversion zeta."
    )
    kernel_parser.add_argument(
        "--sign",
        choices=("statement", "proof"),
        default="statement",
        help="Sign variant of the OU potential kernel.",
    )
    kernel_parser.add_argument(
        "--warp",
        choices=("identity", "exponential", "cubic"),
        default="cubic",
        help="Warp phi for warped-pbar.",
    )

    propagate_parser = sub.add_parser(
        "propagate",
        help="Iterate the approximated semigroup on the grid.",
        add_help=False,
    )
    _add_run_options(propagate_parser)
    propagate_parser.add_argument(
        "-N",
        "--steps",
        type=int,
        default=None,
        help="Number of steps, overrides propagate.n.",
    )
    propagate_parser.add_argument(
        "--kernel-mode",
        choices=("pbar", "q", "exact_affine"),
        default=None,
        help="Step kernel, overrides propagate.kernel-mode.",
    )

    mc_parser = sub.add_parser(
        "mc", help="Feynman-Kac Monte Carlo estimates of u(T, x, y).", add_help=False
    )
    _add_run_options(mc_parser)
    mc_parser.add_argument(
        "--point",
        type=float,
        nargs=2,
        action="append",
        default=None,
        metavar=("X", "Y"),
        help="Starting point, repeatable (default: (0, 3)).",
    )
    mc_parser.add_argument(
        "--zeta",
        type=float,
        default=None,
        help="Use the OU-driven system dX = -Y dt, dY = dW - zeta Y dt.",
    )

    fd_parser = sub.add_parser(
        "fd", help="Finite-difference reference solution.", add_help=False
    )
    _add_run_options(fd_parser)
    fd_parser.add_argument(
        "--self-convergence",
        action="store_true",
        default=False,
        help="Also solve on the refined grid and report the relative L2 change.",
    )

    compare_parser = sub.add_parser(
        "compare",
        help="Relative L1, L2 and Linf errors between two field CSVs.",
        add_help=False,
    )
    _add_run_options(compare_parser)
    compare_parser.add_argument("approx", type=Path, help="Approximating field CSV.")
    compare_parser.add_argument("reference", type=Path, help="Reference field CSV.")
    compare_parser.add_argument(
        "--scenario", default="compare", help="Scenario label for the report."
    )
    compare_parser.add_argument(
        "--iterations",
        type=int,
        default=0,
        help="Iteration count label for the report.",
    )

    table1_parser = sub.add_parser(
        "table1",
        help="Run the table1 benchmark: FD reference, error table and figures.",
        add_help=False,
    )
    _add_run_options(table1_parser)

    rate_parser = sub.add_parser(
        "rate",
        help="Small-time convergence rate of the approximated kernel.",
        add_help=False,
    )
    _add_run_options(rate_parser)

    selftest_parser = sub.add_parser(
        "selftest", help="Run the oracle suite.", add_help=False
    )
    _add_run_options(selftest_parser)


def execute(args: argparse.Namespace) -> int:
    """Main entry point dispatched by the conda plugin system."""
    subcmd = args.subcmd

    if subcmd == "kernel":
        from .kernel import execute_kernel

        return execute_kernel(args)
    elif subcmd == "propagate":
        from .propagate import execute_propagate

        return execute_propagate(args)
    elif subcmd == "mc":
        from .mc import execute_mc

        return execute_mc(args)
    elif subcmd == "fd":
        from .fd import execute_fd

        return execute_fd(args)
    elif subcmd == "compare":
        from .compare import execute_compare

        return execute_compare(args)
    elif subcmd == "table1":
        from .table1 import execute_table1

        return execute_table1(args)
    elif subcmd == "rate":
        from .rate import execute_rate

        return execute_rate(args)
    elif subcmd == "selftest":
        from .selftest import execute_selftest

        return execute_selftest(args)
    else:
        generate_parser().print_help()
        return 0

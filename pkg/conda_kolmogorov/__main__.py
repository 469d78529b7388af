"""Standalone CLI entry point for ``ck`` (short for ``conda kolmogorov``).

This module allows running conda-kolmogorov without going through the
conda plugin dispatch::

    ck kernel oscillator --point -0.5
    ck table1 --out results/table1
    ck selftest --quick

It reuses the same parser and execute logic as ``conda kolmogorov``.
Errors are reported on stderr and their ``return_code`` becomes the exit
status.
"""

from __future__ import annotations

import sys


def main(args: list[str] | None = None) -> None:
    """Entry point for the ``ck`` console script."""
    from .cli.main import execute, generate_parser
    from .exceptions import KolmogorovError

    parser = generate_parser()
    parser.prog = "ck"

    parsed = parser.parse_args(args)
    try:
        code = execute(parsed)
    except KolmogorovError as exc:
        print(f"ck: error: {exc}", file=sys.stderr)
        raise SystemExit(exc.return_code) from exc
    raise SystemExit(code)


if __name__ == "__main__":
    main()

"""Relative discrete L^p errors between fields on the same grid."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np

from .exceptions import DegenerateReferenceError, DomainError, ShapeError
from .models import ErrorReport, Field

if TYPE_CHECKING:
    from typing import Literal

    Norm = Literal[1, 2, "inf"]


def lp_norm(field: Field, p: Norm) -> float:
    """``(sum_i |f_i|^p)^(1/p)`` over the grid nodes, or the max for ``p = "inf"``.

    Nodes are not weighted by cell area.
    """
    if p == "inf" or p == math.inf:
        return float(np.max(np.abs(field.values)))
    if p not in (1, 2):
        raise DomainError("p", p, "must be 1, 2 or 'inf'")
    return float(np.sum(np.abs(field.values) ** p) ** (1.0 / p))


def relative_lp_error(reference: Field, approx: Field, p: Norm) -> float:
    """``|approx - reference|_p / |reference|_p``."""
    if approx.grid != reference.grid:
        raise ShapeError(reference.grid, approx.grid)
    denominator = lp_norm(reference, p)
    if denominator == 0:
        raise DegenerateReferenceError(p)
    diff = Field(approx.grid, approx.values - reference.values)
    return lp_norm(diff, p) / denominator


def error_report(
    approx: Field,
    reference: Field,
    scenario: str,
    n_iterations: int,
    reference_name: str,
) -> ErrorReport:
    return ErrorReport(
        l1=relative_lp_error(reference, approx, 1),
        l2=relative_lp_error(reference, approx, 2),
        linf=relative_lp_error(reference, approx, "inf"),
        scenario=scenario,
        n_iterations=n_iterations,
        reference=reference_name,
    )

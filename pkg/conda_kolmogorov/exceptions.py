"""Custom exceptions for conda-kolmogorov.

Every error carries a ``return_code`` that becomes the process exit code,
both under ``conda kolmogorov`` (conda's exception handler reads it) and
under the standalone ``ck`` script.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from conda.exceptions import CondaError

if TYPE_CHECKING:
    from collections.abc import Iterable


class KolmogorovError(CondaError):
    """Base exception for all conda-kolmogorov errors."""

    return_code = 2


class DomainError(KolmogorovError):
    """Raised when an argument lies outside the domain of a formula."""

    def __init__(self, name: str, value: object, requirement: str):
        super().__init__(f"Invalid {name}={value!r}: {requirement}.")


class SingularityError(KolmogorovError):
    """Raised when an oscillator factor is evaluated at (or next to) a pole."""

    def __init__(self, w: complex, tolerance: float):
        super().__init__(
            f"Oscillator factor has a pole at w={w!r} "
            f"(|sin(sqrt(w))| below {tolerance:g})."
        )


class DegenerateKernelError(KolmogorovError):
    """Raised when a kernel has no density because the x-marginal collapses."""

    def __init__(self, kernel: str, reason: str):
        super().__init__(f"{kernel} kernel is degenerate: {reason}.")


class DegenerateGradientRowError(KolmogorovError):
    """Raised when a propagation grid row has a vanishing drift gradient."""

    def __init__(self, row: int, y: float, norm: float, eps_grad: float):
        super().__init__(
            f"Grid row {row} (y={y:.6g}) has |c'(y)|={norm:.3g} "
            f"<= eps-grad={eps_grad:g}; "
            "the frozen kernel is undefined there. Move the y-range away from this row."
        )


class ShapeError(KolmogorovError):
    """Raised when two fields are not defined on the same grid."""

    def __init__(self, expected: object, got: object):
        super().__init__(f"Grid mismatch: expected {expected}, got {got}.")


class DegenerateReferenceError(KolmogorovError):
    """Raised when a relative error has a zero denominator."""

    def __init__(self, p: object):
        super().__init__(
            f"Reference field has zero L^{p} norm; relative error undefined."
        )


class InvalidDriftError(KolmogorovError):
    """Raised when a drift or warp specification fails its sample-point checks."""

    def __init__(self, name: str, reason: str):
        super().__init__(f"Drift/warp '{name}' failed validation: {reason}.")


class ConfigError(KolmogorovError):
    """Raised when a run configuration cannot be parsed or validated."""

    def __init__(self, location: str, reason: str):
        self.location = location
        super().__init__(f"Invalid configuration at '{location}': {reason}")


class ConfigKeyError(ConfigError):
    """Raised for keys the configuration schema does not know."""

    def __init__(self, location: str, unknown: Iterable[str], allowed: Iterable[str]):
        names = ", ".join(sorted(unknown))
        super().__init__(
            location,
            f"unknown key(s) {names}. Allowed: {', '.join(sorted(allowed))}",
        )


class ConfigFileNotFoundError(ConfigError):
    """Raised when an explicitly requested configuration file is missing."""

    def __init__(self, path: str):
        super().__init__(path, "file does not exist")


class DivergenceError(KolmogorovError):
    """Raised when the finite-difference solver blows up."""

    return_code = 3

    def __init__(self, step: int, growth: float, cfl_report: str):
        super().__init__(
            f"Finite-difference solution diverged at step {step} "
            f"(max|u| grew by {growth:.3g}x). {cfl_report}"
        )


class OracleFailureError(KolmogorovError):
    """Raised by ``selftest`` when at least one oracle fails."""

    return_code = 4

    def __init__(self, failed: list[str]):
        super().__init__(f"{len(failed)} oracle(s) failed: {', '.join(failed)}")


class InversionAccuracyWarning(UserWarning):
    """Emitted when a Fourier inversion could not reach its tail threshold."""

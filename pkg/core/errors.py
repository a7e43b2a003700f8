"""
Exception types shared by the numerical kernels and the command layer.

Kernels raise these; commands translate them into failure results and the CLI
maps them onto exit codes (see ``main.py``). Inequality checks never raise:
a failed check is a report with ``passed=False``.
"""

from typing import Any, Optional


class GevreyError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(GevreyError, ValueError):
    """Invalid (tau, sigma, h) or an out-of-range scalar argument."""


class DomainError(GevreyError, ValueError):
    """A point lies outside the domain where an operation is defined."""


class CapabilityError(GevreyError, ValueError):
    """The request needs more than a component can deliver (e.g. derivative order)."""


class DataError(GevreyError, ValueError):
    """Non-finite or malformed numerical data."""


class ConfigurationError(GevreyError, ValueError):
    """A run configuration or analysis setup cannot be satisfied."""


class NumericalError(GevreyError, RuntimeError):
    """
    A numerical procedure failed to reach its tolerance.

    Attributes:
        partial_value: Best value available when the procedure gave up
        error_estimate: Error estimate attached to ``partial_value``
    """

    def __init__(
        self,
        message: str,
        partial_value: Optional[Any] = None,
        error_estimate: Optional[float] = None,
    ) -> None:
        super().__init__(message)
        self.partial_value = partial_value
        self.error_estimate = error_estimate


# Exit status per error family, used by the CLI.
EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_INTERRUPTED = 130

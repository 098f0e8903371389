"""
VTensor v1.0 - Error types
Every failure the engine can detect has its own exception class so suites can
map it onto a verdict instead of crashing the run.
"""

from typing import Optional


class VTensorError(Exception):
    """Base class for all engine errors."""


class ConfigError(VTensorError):
    """Invalid run configuration."""


class UnknownSuiteError(VTensorError):
    """A suite name that is not registered."""


class RepresentabilityError(VTensorError):
    """A root of unity or power of z that the configured field cannot hold."""


class IllDefinedProductError(VTensorError):
    """A coefficient of a product would need an infinite sum."""


class WindowError(VTensorError):
    """An operation was asked for data outside a validity window."""


class WindowOverflowError(WindowError):
    """An operator pushed a vector past its grade window."""


class DomainExhaustedError(WindowError):
    """A functional was evaluated beyond its certified domain."""

    def __init__(self, required: int, available: Optional[int], what: str = 'functional'):
        self.required = required
        self.available = available
        super().__init__(
            f"{what} needs domain grade {required}, only {available} available"
        )


class NilpotencyCapError(VTensorError):
    """A capped exponential did not terminate within the cap."""

    def __init__(self, cap: int, what: str = 'operator'):
        self.cap = cap
        super().__init__(f"{what} not nilpotent within cap {cap}")


class ReportError(VTensorError):
    """A report could not be written."""

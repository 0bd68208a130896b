"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class BracketingError(RuntimeError):
    """Root bracketing failed: the function never crossed the target level."""


class CalibrationError(RuntimeError):
    """Calibration could not be completed to the requested accuracy."""

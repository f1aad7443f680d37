"""
Custom exceptions for dalpha-seeding.

This module defines package-specific exceptions that provide
clear error messages and carry structured context for logging.
"""

from typing import Any, Dict, Optional


class DAlphaError(Exception):
    """Base exception for all dalpha-seeding errors."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        """
        Initialize the exception with a message and optional details.

        Args:
            message: Human-readable error message
            details: Additional contextual information about the error
        """
        self.message = message
        self.details = details or {}
        super().__init__(self.message)

    def __str__(self) -> str:
        """Return a string representation of the error."""
        if self.details:
            return f"{self.message} - {self.details}"
        return self.message


class UsageError(DAlphaError, ValueError):
    """Raised when an operation is called outside its preconditions."""
    pass


class ExhaustedError(DAlphaError):
    """Raised when no point is left to select as a center."""
    pass


class NumericRangeError(DAlphaError, ArithmeticError):
    """Raised when an unscaled cost is not representable as a finite float."""

    def __init__(
        self,
        message: str,
        log_value: Optional[float] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        """
        Initialize with the log-domain value that could not be exponentiated.

        Args:
            message: Human-readable error message
            log_value: Natural logarithm of the quantity that overflowed
            details: Additional contextual information
        """
        self.log_value = log_value
        super().__init__(message, details)


class StorageError(DAlphaError):
    """Raised when reading or writing a file fails."""
    pass


class ParseError(StorageError):
    """Raised when a dataset or result file cannot be parsed."""

    def __init__(
        self, message: str, line: Optional[int] = None, details: Optional[Dict[str, Any]] = None
    ):
        """
        Initialize with the offending line number.

        Args:
            message: Human-readable error message
            line: 1-based line number in the source file, if known
            details: Additional contextual information
        """
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, details)


class InvariantViolationError(DAlphaError):
    """Raised when internal bookkeeping reaches a contradictory state."""
    pass


class LemmaViolationError(DAlphaError):
    """Raised when a lemma check fails during a verified run."""

    def __init__(self, message: str, report: Any = None, details: Optional[Dict[str, Any]] = None):
        """
        Initialize with the report that contains the failing checks.

        Args:
            message: Human-readable error message
            report: The LemmaReport describing the violation
            details: Additional contextual information
        """
        self.report = report
        super().__init__(message, details)

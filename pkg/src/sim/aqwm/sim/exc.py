"""This module contains the set of simulator exceptions."""

from typing import Optional


class AqwmError(Exception):
    """Base class for exceptions in this module."""


class InvalidArgumentError(AqwmError, ValueError):
    """Exception raised for arguments or configuration outside their domain."""

    def __init__(self, message: str, field: Optional[str] = None):
        if field:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field


class ShapeError(AqwmError, ValueError):
    """Exception raised when lengths or dimensions do not line up."""


class SignalIOError(AqwmError, OSError):
    """Exception raised when a signal, model or document file cannot be read."""


class ParseError(AqwmError, ValueError):
    """Exception raised for a malformed data row."""

    def __init__(self, message: str, row: int):
        super().__init__(f"row {row}: {message}")
        self.row = row


class CodecError(AqwmError, ValueError):
    """Exception raised for a malformed wire frame."""

    def __init__(self, message: str, field: str):
        super().__init__(f"{message} ({field})")
        self.field = field


class InfeasibleParametersError(AqwmError):
    """Exception raised when no watermark parameters satisfy the requested constraints."""

    def __init__(self, message: str, constraint: str):
        super().__init__(message)
        self.constraint = constraint


class TrainingDivergedError(AqwmError):
    """Exception raised when the training loss stops being finite."""

    def __init__(self, epoch: int):
        super().__init__(f"training diverged at epoch {epoch}")
        self.epoch = epoch

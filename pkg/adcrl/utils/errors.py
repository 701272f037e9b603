"""
Exception hierarchy shared by the networks, buffers, agent and harness.
"""
from typing import List, Optional


class AdcError(Exception):
    """Base class for all package errors."""


class DimensionError(AdcError, ValueError):
    """Array or architecture dimensions do not match what the operation needs."""


class NonFiniteError(AdcError, ArithmeticError):
    """A loss or gradient contained NaN or infinity; the update was not applied."""


class InsufficientSamples(AdcError):
    """A buffer holds fewer elements than the requested batch."""

    def __init__(self, available: int, requested: int):
        super().__init__(f"insufficient samples: {available} stored, {requested} requested")
        self.available = available
        self.requested = requested


class CheckpointError(AdcError, ValueError):
    """Checkpoint file is unreadable, corrupt or incompatible."""


class ConfigError(AdcError, ValueError):
    """Invalid configuration; the message names the offending key."""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


class TrainingAborted(AdcError):
    """Training stopped on an env/agent failure; partial metrics were flushed."""

    def __init__(self, message: str, rows: Optional[List] = None):
        super().__init__(message)
        self.rows = list(rows or [])

"""
Pipeline exceptions.

Validation problems are ValueErrors so callers that only know the
standard library can still catch them.
"""

from typing import Optional


class StrokeError(Exception):
    """Base class for pipeline errors"""


class DataError(StrokeError, ValueError):
    """Malformed or inconsistent input data"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        super().__init__(message)
        self.row = row
        self.column = column


class FitError(StrokeError, ValueError):
    """A learner could not be trained on the data it was given"""

    def __init__(self, message: str, algorithm: Optional[str] = None, fold: Optional[int] = None):
        self.detail = message
        if fold is not None:
            message = f"fold {fold}: {message}"
        if algorithm is not None:
            message = f"[{algorithm}] {message}"
        super().__init__(message)
        self.algorithm = algorithm
        self.fold = fold


class ConfigError(StrokeError, ValueError):
    """Invalid experiment configuration or command-line usage"""

"""
Core domain types shared by every stage of the pipeline.
"""

from .errors import StrokeError, DataError, FitError, ConfigError
from .schema import ColumnKind, Column, Dataset, FeatureVector, Label, STROKE, NO_STROKE
from .rng import RngStream, derive_stream
from .contract import TrainedModel, as_matrix

__all__ = [
    "StrokeError",
    "DataError",
    "FitError",
    "ConfigError",
    "ColumnKind",
    "Column",
    "Dataset",
    "FeatureVector",
    "Label",
    "STROKE",
    "NO_STROKE",
    "RngStream",
    "derive_stream",
    "TrainedModel",
    "as_matrix",
]

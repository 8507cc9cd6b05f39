"""
Uniform classifier contract.

Each learner's fit function returns a TrainedModel. score() is a real
value that grows with confidence in class 1 (stroke); predict() returns 1
exactly when score() >= threshold.
"""

from abc import ABC, abstractmethod
from typing import Any, ClassVar, Dict, Union

import numpy as np

from .schema import Dataset

ArrayLike = Union[np.ndarray, Dataset, list]


def as_matrix(x: ArrayLike, n_features: int) -> np.ndarray:
    """Coerce a feature vector, matrix or Dataset to a 2-D float matrix"""
    if isinstance(x, Dataset):
        matrix = x.features
    else:
        matrix = np.asarray(x, dtype=np.float64)
        if matrix.ndim == 1:
            matrix = matrix.reshape(1, -1)
    if matrix.ndim != 2 or matrix.shape[1] != n_features:
        raise ValueError(
            f"Dimension mismatch: model expects {n_features} features, got shape {np.shape(x)}"
        )
    return matrix


class TrainedModel(ABC):
    """
    Fitted classifier state. Instances are never mutated after fitting,
    so they are safe to share across threads.
    """

    algorithm: ClassVar[str] = ""

    def __init__(self, n_features: int, threshold: float):
        self.n_features = int(n_features)
        self.threshold = float(threshold)

    @abstractmethod
    def _scores(self, matrix: np.ndarray) -> np.ndarray:
        """Scores for a validated 2-D matrix"""

    def score(self, x: ArrayLike):
        matrix = as_matrix(x, self.n_features)
        scores = self._scores(matrix)
        if not isinstance(x, Dataset) and np.ndim(x) == 1:
            return float(scores[0])
        return scores

    def predict(self, x: ArrayLike):
        matrix = as_matrix(x, self.n_features)
        labels = (self._scores(matrix) >= self.threshold).astype(np.int8)
        if not isinstance(x, Dataset) and np.ndim(x) == 1:
            return int(labels[0])
        return labels

    @abstractmethod
    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready representation"""

    @classmethod
    @abstractmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainedModel":
        """Inverse of to_dict"""

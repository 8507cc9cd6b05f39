"""
Dataset Schema

Column-oriented table of encoded feature vectors plus a binary label.
Class 1 is always "stroke" and class 0 "no stroke"; every learner score
is oriented toward class 1.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DataError

STROKE = 1
NO_STROKE = 0

Label = int  # 0 or 1
FeatureVector = np.ndarray  # 1-D, aligned with Dataset column order


class ColumnKind(str, Enum):
    """Role of a column in the stroke table"""
    ID = "id"
    CONTINUOUS = "continuous"
    CATEGORICAL = "categorical"   # label-encoded to 0..v-1
    BINARY = "binary"
    LABEL = "label"


FEATURE_KINDS = (ColumnKind.CONTINUOUS, ColumnKind.CATEGORICAL, ColumnKind.BINARY)


@dataclass(frozen=True)
class Column:
    """One feature column of a Dataset"""
    name: str
    kind: ColumnKind
    values: np.ndarray


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Dataset:
    """
    Immutable feature matrix with per-column metadata.

    features is row-major (row_count x column_count); column j carries
    names[j] and kinds[j]. synthetic flags rows created by oversampling.
    """
    features: np.ndarray
    labels: np.ndarray
    names: Tuple[str, ...]
    kinds: Tuple[ColumnKind, ...]
    synthetic: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim == 1 and features.size == 0:
            features = features.reshape(0, len(tuple(self.names)))
        labels = np.asarray(self.labels).astype(np.int8).reshape(-1)
        names = tuple(self.names)
        kinds = tuple(ColumnKind(k) for k in self.kinds)

        if features.ndim != 2:
            raise DataError(f"Feature matrix must be 2-D, got shape {features.shape}")
        if len(names) != features.shape[1] or len(kinds) != features.shape[1]:
            raise DataError(
                f"Column metadata mismatch: {features.shape[1]} columns, "
                f"{len(names)} names, {len(kinds)} kinds"
            )
        if len(set(names)) != len(names):
            raise DataError(f"Duplicate column names: {names}")
        for name, kind in zip(names, kinds):
            if kind not in FEATURE_KINDS:
                raise DataError(f"Column '{name}' has non-feature kind '{kind.value}'", column=name)
        if labels.shape[0] != features.shape[0]:
            raise DataError(
                f"Label vector has {labels.shape[0]} entries for {features.shape[0]} rows"
            )
        if labels.size and not np.isin(labels, (NO_STROKE, STROKE)).all():
            raise DataError("Labels must be 0 (no stroke) or 1 (stroke)")
        if np.isnan(features).any():
            bad_row, bad_col = np.argwhere(np.isnan(features))[0]
            raise DataError(
                f"Missing value at row {bad_row}, column '{names[bad_col]}'",
                row=int(bad_row), column=names[bad_col]
            )

        synthetic = self.synthetic
        if synthetic is None:
            synthetic = np.zeros(features.shape[0], dtype=bool)
        synthetic = np.asarray(synthetic, dtype=bool).reshape(-1)
        if synthetic.shape[0] != features.shape[0]:
            raise DataError("Synthetic flag vector length differs from row count")

        object.__setattr__(self, "features", _readonly(features))
        object.__setattr__(self, "labels", _readonly(labels))
        object.__setattr__(self, "synthetic", _readonly(synthetic))
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "kinds", kinds)

    # ============ Shape ============

    @property
    def row_count(self) -> int:
        return int(self.features.shape[0])

    @property
    def column_count(self) -> int:
        return int(self.features.shape[1])

    @property
    def columns(self) -> List[Column]:
        return [
            Column(name=name, kind=kind, values=self.features[:, j])
            for j, (name, kind) in enumerate(zip(self.names, self.kinds))
        ]

    def column(self, name: str) -> Column:
        try:
            j = self.names.index(name)
        except ValueError:
            raise DataError(f"Unknown column: {name}", column=name) from None
        return Column(name=name, kind=self.kinds[j], values=self.features[:, j])

    def class_counts(self) -> Dict[int, int]:
        """Row counts per class, always keyed {0: ..., 1: ...}"""
        n_stroke = int(np.count_nonzero(self.labels == STROKE))
        return {NO_STROKE: self.row_count - n_stroke, STROKE: n_stroke}

    # ============ Derivation ============

    def subset(self, rows: Sequence[int]) -> "Dataset":
        rows = np.asarray(rows, dtype=np.intp)
        return Dataset(
            features=self.features[rows],
            labels=self.labels[rows],
            names=self.names,
            kinds=self.kinds,
            synthetic=self.synthetic[rows],
        )

    def with_features(self, features: np.ndarray) -> "Dataset":
        return Dataset(
            features=features,
            labels=self.labels,
            names=self.names,
            kinds=self.kinds,
            synthetic=self.synthetic,
        )

    def append(self, features: np.ndarray, labels: np.ndarray, synthetic: bool) -> "Dataset":
        """New dataset with extra rows after the existing ones"""
        features = np.asarray(features, dtype=np.float64).reshape(-1, self.column_count)
        labels = np.asarray(labels).reshape(-1)
        flags = np.full(labels.shape[0], synthetic, dtype=bool)
        return Dataset(
            features=np.vstack([self.features, features]),
            labels=np.concatenate([self.labels, labels.astype(np.int8)]),
            names=self.names,
            kinds=self.kinds,
            synthetic=np.concatenate([self.synthetic, flags]),
        )

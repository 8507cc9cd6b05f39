"""
SMOTE Balancing

Synthesizes minority-class rows until both classes have equal counts.
Each synthetic row is x + u * (x_nn - x) for a minority row x, one of its
k nearest minority neighbours x_nn (chosen uniformly) and u ~ U[0, 1).
Required synthetics are spread round-robin over the minority rows.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
from scipy.spatial.distance import cdist

from ..core.errors import DataError
from ..core.rng import RngStream
from ..core.schema import NO_STROKE, STROKE, ColumnKind, Dataset

logger = logging.getLogger(__name__)

# Rows per distance block when searching neighbours
DISTANCE_BLOCK_ROWS = 1024


@dataclass(frozen=True)
class SmoteConfig:
    """SMOTE parameters; the only target is matching the majority count"""
    k_neighbors: int = 5
    round_categorical: bool = False   # snap encoded categoricals to the nearest code

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise ValueError(f"k_neighbors must be >= 1, got {self.k_neighbors}")


def minority_class(data: Dataset) -> int:
    """Label with fewer rows; stroke on ties"""
    counts = data.class_counts()
    return NO_STROKE if counts[NO_STROKE] < counts[STROKE] else STROKE


def knn_minority(data: Dataset, k: int, minority: Optional[int] = None) -> np.ndarray:
    """
    k nearest minority neighbours of every minority row.

    Returns an (m, k) array of positions within the minority rows (in
    dataset order). Euclidean distance over the encoded features; self is
    excluded; ties are broken by lower position.
    """
    minority = minority_class(data) if minority is None else minority
    points = data.features[data.labels == minority]
    m = points.shape[0]
    if k >= m:
        raise DataError(f"k={k} nearest neighbours need more than {k} minority rows, found {m}")

    neighbors = np.empty((m, k), dtype=np.intp)
    for start in range(0, m, DISTANCE_BLOCK_ROWS):
        stop = min(start + DISTANCE_BLOCK_ROWS, m)
        distances = cdist(points[start:stop], points, metric="sqeuclidean")
        distances[np.arange(stop - start), np.arange(start, stop)] = np.inf
        neighbors[start:stop] = np.argsort(distances, axis=1, kind="stable")[:, :k]
    return neighbors


def oversample(data: Dataset, cfg: SmoteConfig, rng: RngStream) -> Dataset:
    """
    Balance a dataset by appending synthetic minority rows.

    Original rows come first, unmodified; synthetic rows are flagged.
    An already balanced dataset is returned as is.
    """
    counts = data.class_counts()
    if counts[NO_STROKE] == 0 or counts[STROKE] == 0:
        raise DataError(f"SMOTE needs both classes, got counts {counts}")
    if counts[NO_STROKE] == counts[STROKE]:
        logger.info("Classes already balanced; no synthetic rows needed")
        return data

    minority = minority_class(data)
    m = counts[minority]
    n_synthetic = counts[1 - minority] - m
    if m <= cfg.k_neighbors:
        raise DataError(
            f"SMOTE with k={cfg.k_neighbors} needs more than {cfg.k_neighbors} minority rows, found {m}"
        )

    points = data.features[data.labels == minority]
    neighbors = knn_minority(data, cfg.k_neighbors, minority)

    seeds = np.arange(n_synthetic) % m
    picks = rng.integers(0, cfg.k_neighbors, size=n_synthetic)
    gaps = rng.random(n_synthetic)

    base = points[seeds]
    partner = points[neighbors[seeds, picks]]
    synthetic = base + gaps[:, None] * (partner - base)

    if cfg.round_categorical:
        coded = [j for j, kind in enumerate(data.kinds) if kind in (ColumnKind.CATEGORICAL, ColumnKind.BINARY)]
        synthetic[:, coded] = np.rint(synthetic[:, coded])

    balanced = data.append(synthetic, np.full(n_synthetic, minority), synthetic=True)
    logger.info(
        f"SMOTE created {n_synthetic} synthetic rows from {m} minority rows "
        f"(k={cfg.k_neighbors}); {balanced.row_count} rows total"
    )
    return balanced


def class_balance(data: Dataset) -> Dict[str, float]:
    """Counts and percentages per class"""
    counts = data.class_counts()
    total = max(data.row_count, 1)
    return {
        "rows": data.row_count,
        "stroke": counts[STROKE],
        "no_stroke": counts[NO_STROKE],
        "stroke_percent": round(100.0 * counts[STROKE] / total, 4),
        "no_stroke_percent": round(100.0 * counts[NO_STROKE] / total, 4),
    }

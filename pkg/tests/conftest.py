"""
Shared fixtures for the stroke pipeline tests
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from stroke.core.rng import RngStream
from stroke.core.schema import ColumnKind, Dataset

FIXTURES = Path(__file__).parent / "fixtures"


def make_dataset(features, labels, kinds=None) -> Dataset:
    """Dataset with generic column names; continuous unless kinds given"""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim == 1:
        features = features.reshape(-1, 1)
    d = features.shape[1]
    return Dataset(
        features=features,
        labels=np.asarray(labels),
        names=tuple(f"x{j}" for j in range(d)),
        kinds=tuple(kinds or [ColumnKind.CONTINUOUS] * d),
    )


def blobs(seed: int, n_per_class: int = 20, d: int = 2, shift: float = 3.0) -> Dataset:
    """Two Gaussian clouds, class 1 shifted along every axis"""
    gen = np.random.default_rng(seed)
    X0 = gen.normal(0.0, 1.0, size=(n_per_class, d))
    X1 = gen.normal(shift, 1.0, size=(n_per_class, d))
    return make_dataset(np.vstack([X0, X1]), [0] * n_per_class + [1] * n_per_class)


@pytest.fixture
def sample_csv() -> Path:
    return FIXTURES / "stroke_sample.csv"


@pytest.fixture
def golden_encoded() -> Path:
    return FIXTURES / "stroke_sample_encoded.csv"


@pytest.fixture
def rng() -> RngStream:
    return RngStream(42, "test")

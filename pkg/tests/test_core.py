"""
Core types: Dataset, RngStream, model contract, errors
"""

import numpy as np
import pytest

from conftest import blobs, make_dataset
from stroke.core.contract import as_matrix
from stroke.core.errors import DataError, FitError, StrokeError
from stroke.core.rng import RngStream, derive_stream
from stroke.core.schema import ColumnKind, Dataset
from stroke.evaluation.selection import GridSpec
from stroke.models.registry import ALGORITHMS, fit_model, make_hyper


# ============ DATASET ============

def test_dataset_shape_and_counts():
    data = make_dataset([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]], [0, 1, 1])
    assert data.row_count == 3
    assert data.column_count == 2
    assert data.class_counts() == {0: 1, 1: 2}
    assert data.column("x1").values.tolist() == [2.0, 4.0, 6.0]


def test_dataset_is_read_only():
    data = make_dataset([[1.0], [2.0]], [0, 1])
    with pytest.raises(ValueError):
        data.features[0, 0] = 9.0


def test_nan_cell_reports_row_and_column():
    with pytest.raises(DataError) as info:
        make_dataset([[1.0, 2.0], [np.nan, 4.0]], [0, 1])
    assert info.value.row == 1
    assert info.value.column == "x0"


def test_labels_must_be_binary():
    with pytest.raises(DataError):
        make_dataset([[1.0], [2.0]], [0, 2])


def test_label_column_kind_rejected_as_feature():
    with pytest.raises(DataError):
        Dataset(features=np.zeros((2, 1)), labels=[0, 1], names=("stroke",), kinds=(ColumnKind.LABEL,))


def test_append_flags_synthetic_rows():
    data = make_dataset([[1.0], [2.0]], [0, 1])
    grown = data.append([[1.5]], [1], synthetic=True)
    assert grown.row_count == 3
    assert grown.synthetic.tolist() == [False, False, True]
    assert grown.features[:2].tolist() == data.features.tolist()


def test_subset_keeps_metadata():
    data = make_dataset([[1.0], [2.0], [3.0]], [0, 1, 0])
    part = data.subset([2, 0])
    assert part.features[:, 0].tolist() == [3.0, 1.0]
    assert part.names == data.names


def test_empty_dataset_allowed():
    data = make_dataset(np.zeros((0, 3)), [])
    assert data.row_count == 0
    assert data.class_counts() == {0: 0, 1: 0}


# ============ RNG ============

def test_same_label_same_draws():
    a = RngStream(7, "smote").random(100)
    b = RngStream(7, "smote").random(100)
    assert np.array_equal(a, b)


def test_labels_and_seeds_give_independent_streams():
    base = RngStream(7, "smote").random(100)
    assert not np.any(base == RngStream(7, "folds").random(100))
    assert not np.any(base == RngStream(8, "smote").random(100))


def test_child_stream_is_labeled_path():
    child = derive_stream(3, "balanced/rf").child("tree-4")
    assert child.label == "balanced/rf/tree-4"
    assert np.array_equal(child.random(3), RngStream(3, "balanced/rf/tree-4").random(3))


def test_empty_label_rejected():
    with pytest.raises(ValueError):
        RngStream(1, "")


# ============ CONTRACT / ERRORS ============

def test_as_matrix_dimension_mismatch():
    with pytest.raises(ValueError, match="Dimension mismatch"):
        as_matrix([1.0, 2.0, 3.0], n_features=2)
    assert as_matrix([1.0, 2.0], n_features=2).shape == (1, 2)


def test_fit_error_names_algorithm_and_fold():
    error = FitError("singular matrix", algorithm="lr", fold=3)
    assert str(error) == "[lr] fold 3: singular matrix"
    assert error.detail == "singular matrix"
    assert isinstance(error, StrokeError)
    assert isinstance(error, ValueError)


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_predict_agrees_with_score_threshold(algorithm):
    data = blobs(11, n_per_class=15, d=3, shift=1.5)
    hyper = make_hyper(algorithm, GridSpec.for_algorithm(algorithm).combinations()[0])
    model = fit_model(algorithm, data, hyper, RngStream(11, algorithm))

    queries = np.random.default_rng(12).normal(0.75, 2.0, size=(1000, 3))
    scores = model.score(queries)
    assert np.array_equal(model.predict(queries), (scores >= model.threshold).astype(np.int8))
    assert np.array_equal(model.predict(queries), model.predict(queries))
    assert model.predict(queries[0]) == int(scores[0] >= model.threshold)

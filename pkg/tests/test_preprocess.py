"""
Column dropping, missing-row removal, label encoding, normalization, correlation
"""

import numpy as np
import pandas as pd
import pytest

from conftest import make_dataset
from stroke.core.errors import DataError
from stroke.core.schema import ColumnKind
from stroke.ingestion.csv_reader import ID_COLUMN, read_csv, validate_schema
from stroke.ingestion.preprocess import (
    drop_columns,
    drop_missing_rows,
    label_encode,
    min_max_normalize,
    pearson_correlation,
    read_dataset,
    write_dataset,
)


def encode_fixture(path):
    table = read_csv(path)
    schema = validate_schema(table)
    cleaned = drop_missing_rows(drop_columns(table, [ID_COLUMN]))
    return label_encode(cleaned, schema.kinds)


# ============ DROPPING ============

def test_drop_columns_keeps_rows(sample_csv):
    table = read_csv(sample_csv)
    dropped = drop_columns(table, [ID_COLUMN])
    assert ID_COLUMN not in dropped.header
    assert dropped.row_count == table.row_count


def test_drop_unknown_column(sample_csv):
    with pytest.raises(DataError, match="unknown column"):
        drop_columns(read_csv(sample_csv), ["weight"])


def test_drop_missing_rows(sample_csv):
    cleaned = drop_missing_rows(read_csv(sample_csv))
    assert cleaned.row_count == 18
    assert all(cell not in cleaned.missing_tokens for row in cleaned.cells for cell in row)


# ============ ENCODING ============

def test_encoding_matches_golden_file(sample_csv, golden_encoded, tmp_path):
    data, _ = encode_fixture(sample_csv)
    written = pd.read_csv(write_dataset(data, tmp_path / "encoded.csv"))
    expected = pd.read_csv(golden_encoded)
    pd.testing.assert_frame_equal(written, expected, check_dtype=False)


def test_categories_sorted_lexicographically(sample_csv):
    _, encoding = encode_fixture(sample_csv)
    assert encoding.categories["smoking_status"] == ["Unknown", "formerly smoked", "never smoked", "smokes"]
    assert encoding.categories["work_type"] == ["Govt_job", "Never_worked", "Private", "Self-employed", "children"]
    assert encoding.encode("gender", "Male") == 1
    assert encoding.decode("Residence_type", 0) == "Rural"


def test_codes_are_dense(sample_csv):
    data, encoding = encode_fixture(sample_csv)
    for name, categories in encoding.categories.items():
        codes = np.unique(data.column(name).values)
        assert codes.tolist() == list(range(len(categories)))


def test_decoding_recovers_every_cell(sample_csv):
    table = read_csv(sample_csv)
    cleaned = drop_missing_rows(drop_columns(table, [ID_COLUMN]))
    data, encoding = label_encode(cleaned, validate_schema(table).kinds)
    for name in encoding.categories:
        codes = data.column(name).values
        assert [encoding.decode(name, int(c)) for c in codes] == cleaned.column_values(name)


def test_feature_kinds_follow_schema(sample_csv):
    data, _ = encode_fixture(sample_csv)
    assert data.column("age").kind == ColumnKind.CONTINUOUS
    assert data.column("hypertension").kind == ColumnKind.BINARY
    assert data.column("gender").kind == ColumnKind.CATEGORICAL
    assert "stroke" not in data.names


def test_encode_rejects_missing_cells(sample_csv):
    table = read_csv(sample_csv)
    schema = validate_schema(table)
    with pytest.raises(DataError, match="drop missing rows first"):
        label_encode(drop_columns(table, [ID_COLUMN]), schema.kinds)


def test_unknown_category_rejected(sample_csv):
    _, encoding = encode_fixture(sample_csv)
    with pytest.raises(DataError):
        encoding.encode("gender", "Other")


# ============ NORMALIZATION ============

def test_min_max_scales_continuous_columns(sample_csv):
    data, _ = encode_fixture(sample_csv)
    scaled, params = min_max_normalize(data)
    assert set(params.ranges) == {"age", "avg_glucose_level", "bmi"}
    for name in params.ranges:
        values = scaled.column(name).values
        assert values.min() == 0.0
        assert values.max() == 1.0
    assert np.array_equal(scaled.column("gender").values, data.column("gender").values)


def test_constant_column_normalizes_to_zero():
    data = make_dataset([[5.0, 1.0], [5.0, 3.0]], [0, 1])
    scaled, _ = min_max_normalize(data, ["x0", "x1"])
    assert scaled.column("x0").values.tolist() == [0.0, 0.0]
    assert scaled.column("x1").values.tolist() == [0.0, 1.0]


# ============ CORRELATION ============

def test_correlation_matches_numpy(sample_csv):
    data, _ = encode_fixture(sample_csv)
    correlation = pearson_correlation(data)
    for j, name in enumerate(data.names):
        expected = np.corrcoef(data.features[:, j], data.labels.astype(float))[0, 1]
        assert correlation[name] == pytest.approx(expected, abs=1e-12)


def test_feature_equal_to_label_is_perfectly_correlated():
    labels = np.array([0, 1, 1, 0, 1, 0, 0])
    data = make_dataset(np.column_stack([labels, 1 - labels]).astype(float), labels)
    correlation = pearson_correlation(data)
    assert correlation["x0"] == pytest.approx(1.0, abs=1e-12)
    assert correlation["x1"] == pytest.approx(-1.0, abs=1e-12)


def test_constant_feature_has_zero_correlation():
    data = make_dataset([[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]], [0, 1, 1])
    assert pearson_correlation(data)["x0"] == 0.0


def test_correlation_needs_varying_label():
    with pytest.raises(DataError, match="constant"):
        pearson_correlation(make_dataset([[1.0], [2.0]], [1, 1]))
    with pytest.raises(DataError):
        pearson_correlation(make_dataset([[1.0]], [1]))


# ============ FILES ============

def test_dataset_file_preserves_values_and_kinds(sample_csv, tmp_path):
    data, _ = encode_fixture(sample_csv)
    loaded = read_dataset(write_dataset(data, tmp_path / "encoded.csv"))
    assert np.array_equal(loaded.features, data.features)
    assert np.array_equal(loaded.labels, data.labels)
    assert loaded.kinds == data.kinds

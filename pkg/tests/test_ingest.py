"""
CSV reading, schema validation and missing-value profiling
"""

import logging

import pytest

from stroke.core.errors import DataError
from stroke.ingestion.csv_reader import (
    EXPECTED_COLUMNS,
    missing_profile,
    missing_token_set,
    read_csv,
    validate_schema,
)

HEADER = ",".join(EXPECTED_COLUMNS)


def write_csv(tmp_path, rows, header=HEADER):
    path = tmp_path / "data.csv"
    path.write_text("\n".join([header] + rows) + "\n")
    return path


GOOD_ROW = "1,Male,67,0,1,Yes,Private,Urban,228.69,36.6,formerly smoked,1"


# ============ READ ============

def test_reads_fixture_verbatim(sample_csv):
    table = read_csv(sample_csv)
    assert table.row_count == 20
    assert table.header == list(EXPECTED_COLUMNS)
    assert table.column_values("smoking_status")[0] == "formerly smoked"
    assert table.column_values("bmi")[18] == ""


def test_quoted_cells_keep_commas(tmp_path):
    path = write_csv(tmp_path, ['1,Male,67,0,1,Yes,"Private, Ltd",Urban,228.69,36.6,smokes,1'])
    assert read_csv(path).column_values("work_type") == ["Private, Ltd"]


def test_ragged_row_reports_row_number(tmp_path):
    path = write_csv(tmp_path, [GOOD_ROW, "2,Female,61,0,0,Yes"])
    with pytest.raises(DataError, match="Ragged row 2") as info:
        read_csv(path)
    assert info.value.row == 2


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_csv(tmp_path / "absent.csv")


def test_empty_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(DataError, match="Empty file"):
        read_csv(path)


# ============ SCHEMA ============

def test_fixture_validates(sample_csv):
    schema = validate_schema(read_csv(sample_csv))
    assert schema.unexpected == []
    assert "age" in schema.columns_of(EXPECTED_COLUMNS["age"])


def test_missing_label_column(tmp_path):
    header = HEADER.replace(",stroke", "")
    path = write_csv(tmp_path, [GOOD_ROW.rsplit(",", 1)[0]], header=header)
    with pytest.raises(DataError, match="label column"):
        validate_schema(read_csv(path))


def test_non_numeric_age_names_row_and_column(tmp_path):
    path = write_csv(tmp_path, [GOOD_ROW, GOOD_ROW.replace(",67,", ",old,")])
    with pytest.raises(DataError) as info:
        validate_schema(read_csv(path))
    assert info.value.row == 2
    assert info.value.column == "age"


def test_binary_column_rejects_other_values(tmp_path):
    path = write_csv(tmp_path, ["1,Male,67,2,1,Yes,Private,Urban,228.69,36.6,smokes,1"])
    with pytest.raises(DataError, match="hypertension"):
        validate_schema(read_csv(path))


def test_missing_label_value(tmp_path):
    path = write_csv(tmp_path, [GOOD_ROW[:-1]])
    with pytest.raises(DataError, match="Missing label"):
        validate_schema(read_csv(path))


def test_empty_table_rejected(tmp_path):
    path = write_csv(tmp_path, [])
    with pytest.raises(DataError, match="empty table"):
        validate_schema(read_csv(path))


def test_unexpected_column_is_warned(tmp_path, caplog):
    path = write_csv(tmp_path, [GOOD_ROW + ",x"], header=HEADER + ",notes")
    with caplog.at_level(logging.WARNING):
        schema = validate_schema(read_csv(path))
    assert schema.unexpected == ["notes"]
    assert "notes" in caplog.text


def test_column_map_renames_header(tmp_path):
    header = HEADER.replace("Residence_type", "residence")
    path = write_csv(tmp_path, [GOOD_ROW], header=header)
    table = read_csv(path).renamed({"residence": "Residence_type"})
    validate_schema(table)
    assert table.column_values("Residence_type") == ["Urban"]


# ============ MISSING PROFILE ============

def test_missing_profile_counts(sample_csv):
    profile = missing_profile(read_csv(sample_csv))
    assert profile.counts["bmi"] == 1
    assert profile.counts["smoking_status"] == 1
    assert profile.rows_with_missing == 2
    assert profile.total == 2
    assert profile.percent("bmi") == pytest.approx(5.0)


def test_unknown_counts_as_missing_when_enabled(sample_csv):
    tokens = missing_token_set(unknown_is_missing=True)
    profile = missing_profile(read_csv(sample_csv, tokens))
    assert profile.counts["smoking_status"] == 5
    assert profile.rows_with_missing == 6


def test_unknown_is_a_category_by_default():
    assert "Unknown" not in missing_token_set()
    assert {"", "N/A", "NA"} <= missing_token_set(["?"])

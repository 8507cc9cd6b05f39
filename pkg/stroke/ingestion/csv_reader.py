"""
Stroke CSV Reader

Reads the cerebral stroke CSV (UTF-8, comma-delimited, RFC 4180 quoting)
into a RawTable of verbatim cell strings, validates the schema and
profiles missing cells.

Expected header (overridable through a column mapping):
    id, gender, age, hypertension, heart_disease, ever_married, work_type,
    Residence_type, avg_glucose_level, bmi, smoking_status, stroke
"""

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional

from ..core.errors import DataError
from ..core.schema import ColumnKind

logger = logging.getLogger(__name__)

# Always treated as missing; "Unknown" is opt-in (a real smoking_status category)
BASE_MISSING_TOKENS = frozenset({"", "N/A", "NA"})
UNKNOWN_TOKEN = "Unknown"

EXPECTED_COLUMNS: Dict[str, ColumnKind] = {
    "id": ColumnKind.ID,
    "gender": ColumnKind.CATEGORICAL,
    "age": ColumnKind.CONTINUOUS,
    "hypertension": ColumnKind.BINARY,
    "heart_disease": ColumnKind.BINARY,
    "ever_married": ColumnKind.CATEGORICAL,
    "work_type": ColumnKind.CATEGORICAL,
    "Residence_type": ColumnKind.CATEGORICAL,
    "avg_glucose_level": ColumnKind.CONTINUOUS,
    "bmi": ColumnKind.CONTINUOUS,
    "smoking_status": ColumnKind.CATEGORICAL,
    "stroke": ColumnKind.LABEL,
}

LABEL_COLUMN = "stroke"
ID_COLUMN = "id"


def missing_token_set(
    tokens: Optional[Iterable[str]] = None,
    unknown_is_missing: bool = False
) -> FrozenSet[str]:
    """Resolve the missing-token set from config"""
    resolved = set(BASE_MISSING_TOKENS if tokens is None else tokens) | set(BASE_MISSING_TOKENS)
    if unknown_is_missing:
        resolved.add(UNKNOWN_TOKEN)
    return frozenset(resolved)


@dataclass(frozen=True)
class RawTable:
    """Header plus row-major grid of verbatim cell strings"""
    header: List[str]
    cells: List[List[str]]
    missing_tokens: FrozenSet[str] = field(default=BASE_MISSING_TOKENS)

    @property
    def row_count(self) -> int:
        return len(self.cells)

    def column_index(self, name: str) -> int:
        try:
            return self.header.index(name)
        except ValueError:
            raise DataError(f"Unknown column: {name}", column=name) from None

    def column_values(self, name: str) -> List[str]:
        j = self.column_index(name)
        return [row[j] for row in self.cells]

    def is_missing(self, cell: str) -> bool:
        return cell in self.missing_tokens

    def renamed(self, mapping: Dict[str, str]) -> "RawTable":
        """Header with file names replaced by canonical names"""
        if not mapping:
            return self
        header = [mapping.get(name, name) for name in self.header]
        return RawTable(header=header, cells=self.cells, missing_tokens=self.missing_tokens)


@dataclass
class SchemaAssignment:
    """Result of schema validation"""
    kinds: Dict[str, ColumnKind]
    unexpected: List[str] = field(default_factory=list)

    def columns_of(self, kind: ColumnKind) -> List[str]:
        return [name for name, k in self.kinds.items() if k == kind]


@dataclass
class MissingProfile:
    """Missing-cell counts per column"""
    counts: Dict[str, int]
    row_count: int
    rows_with_missing: int

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def percent(self, column: str) -> float:
        if self.row_count == 0:
            return 0.0
        return 100.0 * self.counts[column] / self.row_count

    def to_dict(self) -> dict:
        return {
            "row_count": self.row_count,
            "rows_with_missing": self.rows_with_missing,
            "counts": dict(self.counts),
            "percent": {name: round(self.percent(name), 4) for name in self.counts},
        }


def read_csv(path, missing_tokens: Optional[Iterable[str]] = None) -> RawTable:
    """
    Read a CSV file into a RawTable.

    Cells are kept verbatim. Rows whose cell count differs from the
    header are rejected with their 1-based data row number.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Dataset file not found: {path}")

    tokens = frozenset(BASE_MISSING_TOKENS if missing_tokens is None else missing_tokens)

    with open(path, "r", encoding="utf-8-sig", newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"Empty file (no header row): {path}") from None

        cells: List[List[str]] = []
        for row_number, row in enumerate(reader, start=1):
            if len(row) != len(header):
                raise DataError(
                    f"Ragged row {row_number} (line {reader.line_num}): "
                    f"expected {len(header)} cells, found {len(row)}",
                    row=row_number
                )
            cells.append(row)

    logger.info(f"Read {len(cells)} rows x {len(header)} columns from {path}")
    return RawTable(header=header, cells=cells, missing_tokens=tokens)


def _parse_number(cell: str, row: int, column: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise DataError(
            f"Non-numeric value {cell!r} at row {row}, column '{column}'",
            row=row, column=column
        ) from None


def validate_schema(
    table: RawTable,
    expected: Optional[Dict[str, ColumnKind]] = None
) -> SchemaAssignment:
    """
    Check that every expected column is present and its cells fit its kind.

    Continuous and binary cells must parse as numbers unless they are
    missing tokens; binary cells must be 0 or 1; the label may not be
    missing and must be 0 or 1.
    """
    expected = EXPECTED_COLUMNS if expected is None else expected
    if table.row_count == 0:
        raise DataError("Cannot validate an empty table")

    missing_columns = [name for name in expected if name not in table.header]
    if LABEL_COLUMN in missing_columns:
        raise DataError(f"Missing label column '{LABEL_COLUMN}'", column=LABEL_COLUMN)
    if missing_columns:
        raise DataError(f"Missing required column(s): {', '.join(missing_columns)}")

    unexpected = [name for name in table.header if name not in expected]
    if unexpected:
        logger.warning(f"Unexpected columns (ignored): {unexpected}")

    for name, kind in expected.items():
        j = table.column_index(name)
        for row_number, row in enumerate(table.cells, start=1):
            cell = row[j]
            if kind == ColumnKind.LABEL:
                if table.is_missing(cell):
                    raise DataError(f"Missing label at row {row_number}", row=row_number, column=name)
                if _parse_number(cell, row_number, name) not in (0.0, 1.0):
                    raise DataError(
                        f"Label must be 0 or 1, got {cell!r} at row {row_number}",
                        row=row_number, column=name
                    )
            elif kind in (ColumnKind.CONTINUOUS, ColumnKind.BINARY):
                if table.is_missing(cell):
                    continue
                value = _parse_number(cell, row_number, name)
                if kind == ColumnKind.BINARY and value not in (0.0, 1.0):
                    raise DataError(
                        f"Binary column '{name}' holds {cell!r} at row {row_number}",
                        row=row_number, column=name
                    )

    kinds = {name: expected[name] for name in table.header if name in expected}
    return SchemaAssignment(kinds=kinds, unexpected=unexpected)


def missing_profile(table: RawTable) -> MissingProfile:
    """Exact count of missing cells per column"""
    counts = {name: 0 for name in table.header}
    rows_with_missing = 0
    for row in table.cells:
        row_has_missing = False
        for name, cell in zip(table.header, row):
            if cell in table.missing_tokens:
                counts[name] += 1
                row_has_missing = True
        rows_with_missing += row_has_missing

    return MissingProfile(counts=counts, row_count=table.row_count, rows_with_missing=rows_with_missing)

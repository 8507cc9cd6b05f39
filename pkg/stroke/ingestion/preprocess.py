"""
Preprocessing

Turns a validated RawTable into a numeric Dataset:
- drop irrelevant columns (patient id)
- drop rows holding any missing cell
- label-encode categoricals to dense codes 0..v-1 (lexicographic order)
- optional min-max normalization
- Pearson correlation of every feature with the label
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from ..core.errors import DataError
from ..core.schema import FEATURE_KINDS, ColumnKind, Dataset
from .csv_reader import LABEL_COLUMN, RawTable

logger = logging.getLogger(__name__)


class EncodingMap(BaseModel):
    """Per categorical column, categories in code order (code = list index)"""
    categories: Dict[str, List[str]] = Field(default_factory=dict)

    def cardinality(self, column: str) -> int:
        return len(self.categories[column])

    def encode(self, column: str, value: str) -> int:
        try:
            return self.categories[column].index(value)
        except ValueError:
            raise DataError(f"Unknown category {value!r} for column '{column}'", column=column) from None

    def decode(self, column: str, code: int) -> str:
        values = self.categories[column]
        if not 0 <= int(code) < len(values):
            raise DataError(f"Code {code} out of range for column '{column}'", column=column)
        return values[int(code)]


class NormalizationParams(BaseModel):
    """Per-column (min, max) used by min-max scaling"""
    ranges: Dict[str, Tuple[float, float]] = Field(default_factory=dict)

    def apply(self, data: Dataset) -> Dataset:
        """Transform a dataset with stored ranges; degenerate columns map to 0"""
        features = np.array(data.features, copy=True)
        for name, (low, high) in self.ranges.items():
            j = data.names.index(name)
            span = high - low
            if span > 0:
                features[:, j] = (features[:, j] - low) / span
            else:
                features[:, j] = 0.0
        return data.with_features(features)


def drop_columns(table: RawTable, names: Sequence[str]) -> RawTable:
    """Remove columns by name; row count is unchanged"""
    unknown = [name for name in names if name not in table.header]
    if unknown:
        raise DataError(f"Cannot drop unknown column(s): {', '.join(unknown)}")
    if not names:
        return table

    keep = [j for j, name in enumerate(table.header) if name not in set(names)]
    header = [table.header[j] for j in keep]
    cells = [[row[j] for j in keep] for row in table.cells]
    logger.info(f"Dropped columns {list(names)}; {len(header)} remain")
    return RawTable(header=header, cells=cells, missing_tokens=table.missing_tokens)


def drop_missing_rows(table: RawTable) -> RawTable:
    """Remove every row holding at least one missing cell"""
    tokens = table.missing_tokens
    cells = [row for row in table.cells if not any(cell in tokens for cell in row)]
    dropped = table.row_count - len(cells)
    logger.info(f"Dropped {dropped} rows with missing values; {len(cells)} remain")
    return RawTable(header=table.header, cells=cells, missing_tokens=tokens)


def label_encode(table: RawTable, kinds: Dict[str, ColumnKind]) -> Tuple[Dataset, EncodingMap]:
    """
    Encode a complete table into a Dataset.

    Feature columns keep header order. Categorical cells get their index
    in the sorted list of distinct values; the label column maps to 1
    (stroke) / 0 (no stroke).
    """
    for name in table.header:
        for row_number, cell in enumerate(table.column_values(name), start=1):
            if table.is_missing(cell):
                raise DataError(
                    f"Missing cell at row {row_number}, column '{name}'; drop missing rows first",
                    row=row_number, column=name
                )

    feature_names = [name for name in table.header if kinds.get(name) in FEATURE_KINDS]
    encoding = EncodingMap()
    columns = []

    for name in feature_names:
        raw = table.column_values(name)
        if kinds[name] == ColumnKind.CATEGORICAL:
            categories = sorted(set(raw))
            codes = {value: code for code, value in enumerate(categories)}
            encoding.categories[name] = categories
            columns.append(np.array([codes[value] for value in raw], dtype=np.float64))
        else:
            columns.append(np.array([float(value) for value in raw], dtype=np.float64))

    features = np.column_stack(columns) if columns else np.zeros((table.row_count, 0))
    labels = np.array([float(value) for value in table.column_values(LABEL_COLUMN)]).astype(np.int8)

    dataset = Dataset(
        features=features,
        labels=labels,
        names=tuple(feature_names),
        kinds=tuple(kinds[name] for name in feature_names),
    )
    cardinalities = {name: len(values) for name, values in encoding.categories.items()}
    logger.info(f"Encoded {dataset.row_count} rows; categorical cardinalities: {cardinalities}")
    return dataset, encoding


def min_max_normalize(
    data: Dataset,
    columns: Optional[Sequence[str]] = None
) -> Tuple[Dataset, NormalizationParams]:
    """Scale columns to [0, 1]; defaults to the continuous columns"""
    if columns is None:
        columns = [name for name, kind in zip(data.names, data.kinds) if kind == ColumnKind.CONTINUOUS]

    params = NormalizationParams()
    for name in columns:
        values = data.column(name).values
        if values.size == 0:
            params.ranges[name] = (0.0, 0.0)
        else:
            params.ranges[name] = (float(values.min()), float(values.max()))
    return params.apply(data), params


def pearson_correlation(data: Dataset) -> Dict[str, float]:
    """
    Pearson's r of every feature with the label.

    Constant features get r = 0.
    """
    if data.row_count < 2:
        raise DataError(f"Correlation needs at least 2 rows, got {data.row_count}")

    y = data.labels.astype(np.float64)
    y_centered = y - y.mean()
    y_norm = np.sqrt(np.dot(y_centered, y_centered))
    if y_norm == 0:
        raise DataError("Correlation undefined: label is constant")

    x_centered = data.features - data.features.mean(axis=0)
    x_norm = np.sqrt(np.einsum("ij,ij->j", x_centered, x_centered))
    covariance = x_centered.T @ y_centered

    result: Dict[str, float] = {}
    for j, name in enumerate(data.names):
        if x_norm[j] == 0:
            result[name] = 0.0
        else:
            r = covariance[j] / (x_norm[j] * y_norm)
            result[name] = float(np.clip(r, -1.0, 1.0))
    return result


# ============ Dataset files ============

def schema_path_for(path: Path) -> Path:
    return path.with_suffix(".schema.json")


def write_dataset(data: Dataset, path) -> Path:
    """
    Write an encoded dataset as CSV (features + label) with a sidecar
    schema file carrying the column kinds.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    frame = pd.DataFrame(data.features, columns=list(data.names))
    frame[LABEL_COLUMN] = data.labels.astype(int)
    frame.to_csv(path, index=False)

    schema = {
        "columns": [{"name": n, "kind": k.value} for n, k in zip(data.names, data.kinds)],
        "label": LABEL_COLUMN,
    }
    schema_path_for(path).write_text(json.dumps(schema, indent=2))
    return path


def read_dataset(path) -> Dataset:
    """Inverse of write_dataset; float columns round-trip bit-for-bit"""
    path = Path(path)
    schema = json.loads(schema_path_for(path).read_text())
    frame = pd.read_csv(path, float_precision="round_trip")

    names = [column["name"] for column in schema["columns"]]
    kinds = [ColumnKind(column["kind"]) for column in schema["columns"]]
    return Dataset(
        features=frame[names].to_numpy(dtype=np.float64),
        labels=frame[schema["label"]].to_numpy(),
        names=tuple(names),
        kinds=tuple(kinds),
    )

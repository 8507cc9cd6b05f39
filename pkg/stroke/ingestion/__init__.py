"""Reading, cleaning, encoding and balancing the stroke table"""

from .csv_reader import (
    EXPECTED_COLUMNS,
    RawTable,
    missing_profile,
    missing_token_set,
    read_csv,
    validate_schema,
)
from .preprocess import (
    EncodingMap,
    NormalizationParams,
    drop_columns,
    drop_missing_rows,
    label_encode,
    min_max_normalize,
    pearson_correlation,
    read_dataset,
    write_dataset,
)
from .smote import SmoteConfig, class_balance, knn_minority, oversample

__all__ = [
    "EXPECTED_COLUMNS",
    "RawTable",
    "read_csv",
    "validate_schema",
    "missing_profile",
    "missing_token_set",
    "EncodingMap",
    "NormalizationParams",
    "drop_columns",
    "drop_missing_rows",
    "label_encode",
    "min_max_normalize",
    "pearson_correlation",
    "write_dataset",
    "read_dataset",
    "SmoteConfig",
    "oversample",
    "knn_minority",
    "class_balance",
]

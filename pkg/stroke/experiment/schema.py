"""
Experiment report documents.

Everything a run produces that downstream figure tables need is kept
here, so `report` never has to touch the dataset again.
"""

from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from ..evaluation.metrics import ConfusionMatrix, MetricsReport

SCHEMA_VERSION = "1.0"

# Keys holding wall-clock values; dropped when comparing runs
VOLATILE_KEYS = frozenset({"created_at", "environment", "timings", "seconds", "model_path"})


class PreprocessingReport(BaseModel):
    source: str
    input_rows: int
    missing: Dict[str, Any]
    rows_after_drop: int
    dropped_columns: List[str]
    class_counts: Dict[str, int]
    categories: Dict[str, List[str]]
    correlation: Dict[str, float]
    normalization: Optional[Dict[str, List[float]]] = None
    sampled_rows: Optional[int] = None


class TuningCell(BaseModel):
    params: Dict[str, Any]
    mean_f_macro: Optional[float] = None
    fold_f_macro: List[float] = Field(default_factory=list)
    error: Optional[str] = None
    seconds: float = 0.0


class TuningReport(BaseModel):
    grid_size: int
    tuning_k: int
    best_index: int
    best_params: Dict[str, Any]
    best_score: float
    cells: List[TuningCell]
    seconds: float


class FoldReport(BaseModel):
    fold: int
    rows: int
    confusion: ConfusionMatrix
    metrics: MetricsReport


class AlgorithmResult(BaseModel):
    algorithm: str
    status: str = "ok"   # ok | failed
    error: Optional[str] = None
    tuning: Optional[TuningReport] = None
    hyper: Optional[Dict[str, Any]] = None
    confusion: Optional[ConfusionMatrix] = None
    pooled: Optional[MetricsReport] = None
    folds: List[FoldReport] = Field(default_factory=list)
    timings: Dict[str, float] = Field(default_factory=dict)
    notes: List[str] = Field(default_factory=list)
    model_path: Optional[str] = None


class RegimeResult(BaseModel):
    regime: str
    rows: int
    balance: Dict[str, float]
    algorithms: List[AlgorithmResult] = Field(default_factory=list)

    def result(self, algorithm: str) -> Optional[AlgorithmResult]:
        return next((r for r in self.algorithms if r.algorithm == algorithm), None)


class ExperimentReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    created_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    environment: Dict[str, str] = Field(default_factory=dict)
    config: Dict[str, Any]
    metadata: Dict[str, Any] = Field(default_factory=dict)
    preprocessing: PreprocessingReport
    regimes: List[RegimeResult] = Field(default_factory=list)

    def regime(self, name: str) -> Optional[RegimeResult]:
        return next((r for r in self.regimes if r.regime == name), None)

    @property
    def failed(self) -> List[str]:
        return [
            f"{regime.regime}/{result.algorithm}"
            for regime in self.regimes
            for result in regime.algorithms
            if result.status != "ok"
        ]


def _strip(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _strip(v) for k, v in value.items() if k not in VOLATILE_KEYS}
    if isinstance(value, list):
        return [_strip(v) for v in value]
    return value


def normalized(report: ExperimentReport) -> Dict[str, Any]:
    """Report content with timestamps, environment and timings removed"""
    return _strip(report.model_dump(mode="json"))

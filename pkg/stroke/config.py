"""
Experiment Configuration

All settings load from environment variables (STROKE_ prefix, .env file
supported) with defaults matching the reference protocol. A flat TOML
file and command-line flags can override them:

    flags > config file > environment > defaults
"""

import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import Field, ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .core.errors import ConfigError
from .core.rng import DEFAULT_SEED
from .models.logreg import RegConvention
from .models.registry import ALGORITHMS, LearnerOptions

logger = logging.getLogger(__name__)


class BalanceMode(str, Enum):
    NONE = "none"
    WHOLE = "whole"         # SMOTE the full dataset before splitting
    PER_FOLD = "per-fold"   # SMOTE each training split only


REGIMES = ("unbalanced", "balanced")


class ExperimentSettings(BaseSettings):
    """Stroke experiment configuration."""

    model_config = SettingsConfigDict(env_prefix="STROKE_", env_file=".env", extra="ignore")

    # Input
    data_path: Optional[Path] = Field(
        default=None,
        description="Cerebral stroke CSV (raw) to read"
    )
    column_map: Dict[str, str] = Field(
        default_factory=dict,
        description="Header overrides: file column name -> expected column name"
    )
    missing_tokens: List[str] = Field(
        default=["", "N/A", "NA"],
        description="Cell values treated as missing"
    )
    unknown_is_missing: bool = Field(
        default=False,
        description="Also treat 'Unknown' (smoking_status) as missing"
    )
    normalize: bool = Field(
        default=False,
        description="Min-max normalize continuous columns after encoding"
    )

    # Reproducibility
    seed: int = Field(
        default=DEFAULT_SEED,
        description="Master seed; every random component derives from it"
    )
    sample_frac: float = Field(
        default=1.0,
        gt=0.0,
        le=1.0,
        description="Stratified subsample of the encoded dataset for desk-scale runs"
    )

    # Balancing
    balance: BalanceMode = Field(
        default=BalanceMode.WHOLE,
        description="How the balanced regime applies SMOTE"
    )
    smote_k: int = Field(
        default=5,
        ge=1,
        description="Nearest minority neighbours considered by SMOTE"
    )
    smote_round_categorical: bool = Field(
        default=False,
        description="Round synthetic categorical/binary values to the nearest code"
    )

    # Protocol
    regimes: List[str] = Field(
        default=list(REGIMES),
        description="Regimes to run: unbalanced and/or balanced"
    )
    algorithms: List[str] = Field(
        default=list(ALGORITHMS),
        description="Algorithms to tune and evaluate"
    )
    tuning_k: int = Field(
        default=3,
        ge=2,
        le=10,
        description="Folds inside grid search"
    )
    eval_k: int = Field(
        default=10,
        ge=2,
        description="Folds for the final evaluation"
    )
    reg_convention: RegConvention = Field(
        default=RegConvention.LAMBDA,
        description="Read the LR grid value as the penalty weight (lambda) or as C (inverse)"
    )

    # Learner knobs
    svm_tolerance: float = Field(default=1e-3, gt=0, description="SMO KKT tolerance")
    svm_max_passes: int = Field(default=100, ge=1, description="SMO iteration budget per training row")
    lr_max_iter: int = Field(default=3000, ge=1, description="LR solver iteration cap")
    lr_tol: float = Field(default=1e-6, gt=0, description="LR mean gradient norm tolerance")

    # Output
    out_dir: Path = Field(default=Path("results"), description="Report and artifact directory")
    n_jobs: int = Field(default=1, description="joblib workers for grid cells (1 = serial, -1 = all cores)")
    save_models: bool = Field(default=True, description="Refit tuned models on the full regime data and save them")

    @field_validator("algorithms")
    @classmethod
    def _known_algorithms(cls, value: List[str]) -> List[str]:
        if not value:
            raise ValueError("At least one algorithm is required")
        unknown = [a for a in value if a not in ALGORITHMS]
        if unknown:
            raise ValueError(f"Unknown algorithm(s) {unknown}; choose from {list(ALGORITHMS)}")
        return [a for a in ALGORITHMS if a in value]

    @field_validator("regimes")
    @classmethod
    def _known_regimes(cls, value: List[str]) -> List[str]:
        if not value:
            raise ValueError("At least one regime is required")
        unknown = [r for r in value if r not in REGIMES]
        if unknown:
            raise ValueError(f"Unknown regime(s) {unknown}; choose from {list(REGIMES)}")
        return [r for r in REGIMES if r in value]

    @field_validator("n_jobs")
    @classmethod
    def _valid_jobs(cls, value: int) -> int:
        if value == 0:
            raise ValueError("n_jobs must be non-zero")
        return value

    @model_validator(mode="after")
    def _balance_needs_regime(self) -> "ExperimentSettings":
        if self.balance == BalanceMode.NONE and self.regimes != ["unbalanced"]:
            self.regimes = ["unbalanced"]
        return self

    @property
    def active_regimes(self) -> List[str]:
        return list(self.regimes)

    def learner_options(self) -> LearnerOptions:
        return LearnerOptions(
            svm_tolerance=self.svm_tolerance,
            svm_max_passes=self.svm_max_passes,
            lr_max_iter=self.lr_max_iter,
            lr_tol=self.lr_tol,
            reg_convention=self.reg_convention,
        )

    def echo(self) -> Dict[str, Any]:
        """Fully resolved configuration for the report"""
        return self.model_dump(mode="json")


def read_config_file(path) -> Dict[str, Any]:
    """Flat TOML document; keys are ExperimentSettings field names"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    try:
        with open(path, "rb") as f:
            values = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Invalid TOML in {path}: {e}") from e

    unknown = [key for key in values if key not in ExperimentSettings.model_fields]
    if unknown:
        raise ConfigError(f"Unknown config key(s) in {path}: {', '.join(unknown)}")
    return values


def load_settings(config_file=None, overrides: Optional[Dict[str, Any]] = None) -> ExperimentSettings:
    """
    Resolve settings. Init kwargs beat the environment in pydantic-settings,
    so file values and then flag overrides are merged and passed as kwargs.
    """
    values: Dict[str, Any] = {}
    if config_file is not None:
        values.update(read_config_file(config_file))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        settings = ExperimentSettings(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e
    logger.debug(f"Resolved settings: {settings.echo()}")
    return settings

"""
Learner registry.

Maps algorithm ids to hyperparameter types, fit functions, model
classes and their tuning grids, so the experiment layer can treat all
five learners uniformly.
"""

from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Type

from pydantic import BaseModel, ValidationError

from ..core.contract import TrainedModel
from ..core.errors import ConfigError
from ..core.rng import RngStream
from ..core.schema import Dataset
from .bayes import NbModel, fit_nb
from .logreg import LrHyper, LrModel, RegConvention, fit_lr
from .svm import SvmHyper, SvmModel, fit_svm
from .tree import ForestHyper, ForestModel, TreeHyper, TreeModel, fit_forest, fit_tree

# Reporting order
ALGORITHMS = ("dt", "rf", "svm", "nb", "lr")

DISPLAY_NAMES = {
    "dt": "Decision Tree",
    "rf": "Random Forest",
    "svm": "Support Vector Machine",
    "nb": "Naive Bayes",
    "lr": "Logistic Regression",
}

MAX_FEATURES_GRID = ["none", "auto", "sqrt", "log2"]

# Tuning grids; parameter order fixes enumeration order (first key varies slowest)
GRIDS: Dict[str, Dict[str, List[Any]]] = {
    "dt": {
        "criterion": ["gini", "entropy"],
        "max_features": MAX_FEATURES_GRID,
    },
    "rf": {
        "n_estimators": [10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 200, 300, 400, 500],
        "criterion": ["gini", "entropy"],
        "max_features": MAX_FEATURES_GRID,
    },
    "svm": {
        "C": [0.1, 2.0 ** -2, 2.0 ** 0, 2.0 ** 2, 2.0 ** 4, 2.0 ** 6],
        "gamma": [2.0 ** -6, 2.0 ** -4, 2.0 ** -2, 2.0 ** 0, 2.0 ** 2],
    },
    "nb": {},
    "lr": {
        "reg": [2.0 ** -6, 2.0 ** -4, 2.0 ** -2, 2.0 ** 0, 2.0 ** 2, 2.0 ** 4, 2.0 ** 6],
        "solver": ["newton", "gradient", "sag"],
    },
}


class NbHyper(BaseModel):
    """Gaussian NB has nothing to tune"""


@dataclass(frozen=True)
class LearnerOptions:
    """Fixed (untuned) learner settings"""
    svm_tolerance: float = 1e-3
    svm_max_passes: int = 100
    lr_max_iter: int = 3000
    lr_tol: float = 1e-6
    reg_convention: RegConvention = RegConvention.LAMBDA


@dataclass(frozen=True)
class Learner:
    algorithm: str
    hyper_type: Type[BaseModel]
    model_type: Type[TrainedModel]
    fit: Callable[..., TrainedModel]


def _fit_forest(train: Dataset, hyper: ForestHyper, rng: RngStream, n_jobs: int = 1) -> ForestModel:
    return fit_forest(train, hyper, rng, n_jobs=n_jobs)


LEARNERS: Dict[str, Learner] = {
    "dt": Learner("dt", TreeHyper, TreeModel, lambda train, hyper, rng, n_jobs=1: fit_tree(train, hyper, rng)),
    "rf": Learner("rf", ForestHyper, ForestModel, _fit_forest),
    "svm": Learner("svm", SvmHyper, SvmModel, lambda train, hyper, rng, n_jobs=1: fit_svm(train, hyper, rng)),
    "nb": Learner("nb", NbHyper, NbModel, lambda train, hyper, rng, n_jobs=1: fit_nb(train)),
    "lr": Learner("lr", LrHyper, LrModel, lambda train, hyper, rng, n_jobs=1: fit_lr(train, hyper, rng)),
}


def learner(algorithm: str) -> Learner:
    try:
        return LEARNERS[algorithm]
    except KeyError:
        raise ConfigError(
            f"Unknown algorithm '{algorithm}'. Choose from: {', '.join(ALGORITHMS)}"
        ) from None


def make_hyper(algorithm: str, params: Dict[str, Any], options: Optional[LearnerOptions] = None) -> BaseModel:
    """Hyperparameter object for one grid combination plus the fixed options"""
    options = options or LearnerOptions()
    values = dict(params)
    if algorithm == "svm":
        values.setdefault("tolerance", options.svm_tolerance)
        values.setdefault("max_passes", options.svm_max_passes)
    elif algorithm == "lr":
        values.setdefault("max_iter", options.lr_max_iter)
        values.setdefault("tol", options.lr_tol)
        values.setdefault("convention", options.reg_convention)
    try:
        return learner(algorithm).hyper_type(**values)
    except ValidationError as e:
        raise ConfigError(f"Invalid {algorithm} hyperparameters {params}: {e}") from e


def fit_model(
    algorithm: str,
    train: Dataset,
    hyper: BaseModel,
    rng: RngStream,
    n_jobs: int = 1
) -> TrainedModel:
    return learner(algorithm).fit(train, hyper, rng, n_jobs=n_jobs)


def model_from_dict(data: Dict[str, Any]) -> TrainedModel:
    """Rebuild any saved model from its to_dict() form"""
    return learner(data["algorithm"]).model_type.from_dict(data)

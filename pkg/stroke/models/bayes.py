"""
Gaussian Naive Bayes

Every feature, encoded categoricals included, gets a per-class normal
likelihood. Posteriors are evaluated in log space and normalized over
the two classes.
"""

import logging
from typing import Any, Dict

import numpy as np
from scipy.special import expit, logsumexp

from ..core.contract import TrainedModel
from ..core.errors import FitError
from ..core.schema import NO_STROKE, STROKE, Dataset

logger = logging.getLogger(__name__)

VARIANCE_FLOOR_SCALE = 1e-9
LOG_2PI = np.log(2.0 * np.pi)


class NbModel(TrainedModel):
    """
    Class priors plus per-class feature means and variances.

    score = log P(stroke | x) - log P(no stroke | x). A log-odds of
    exactly 0 (posterior 0.5) predicts no stroke.
    """

    algorithm = "nb"

    def __init__(self, priors, means, variances, epsilon: float):
        means = np.asarray(means, dtype=np.float64)
        super().__init__(n_features=means.shape[1], threshold=float(np.nextafter(0.0, 1.0)))
        self.priors = np.asarray(priors, dtype=np.float64)
        self.means = means
        self.variances = np.asarray(variances, dtype=np.float64)
        self.epsilon = float(epsilon)

    def joint_log_likelihood(self, matrix: np.ndarray) -> np.ndarray:
        """(rows, 2) array of log P(class) + sum_j log p(x_j | class)"""
        columns = []
        for c in (NO_STROKE, STROKE):
            var = self.variances[c]
            ll = -0.5 * (np.sum(LOG_2PI + np.log(var)) + np.sum((matrix - self.means[c]) ** 2 / var, axis=1))
            columns.append(np.log(self.priors[c]) + ll)
        return np.column_stack(columns)

    def class_posteriors(self, matrix: np.ndarray) -> np.ndarray:
        joint = self.joint_log_likelihood(matrix)
        return np.exp(joint - logsumexp(joint, axis=1, keepdims=True))

    def _scores(self, matrix: np.ndarray) -> np.ndarray:
        joint = self.joint_log_likelihood(matrix)
        return joint[:, STROKE] - joint[:, NO_STROKE]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "priors": self.priors.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NbModel":
        return cls(
            priors=data["priors"],
            means=data["means"],
            variances=data["variances"],
            epsilon=data["epsilon"],
        )


def fit_nb(train: Dataset, rng=None) -> NbModel:
    """Priors from class frequencies; variances floored at 1e-9 x the largest feature variance"""
    counts = train.class_counts()
    if counts[NO_STROKE] == 0 or counts[STROKE] == 0:
        raise FitError(f"Naive Bayes needs both classes, got counts {counts}", algorithm="nb")

    X = train.features
    largest = float(X.var(axis=0).max()) if X.shape[1] else 0.0
    epsilon = VARIANCE_FLOOR_SCALE * largest if largest > 0 else VARIANCE_FLOOR_SCALE

    priors, means, variances = [], [], []
    for c in (NO_STROKE, STROKE):
        rows = X[train.labels == c]
        priors.append(rows.shape[0] / X.shape[0])
        means.append(rows.mean(axis=0))
        variances.append(np.maximum(rows.var(axis=0), epsilon))

    logger.debug(f"NB fit: priors={priors}, variance floor={epsilon:.3g}")
    return NbModel(priors=priors, means=np.vstack(means), variances=np.vstack(variances), epsilon=epsilon)


def posterior(model: NbModel, x):
    """P(stroke | x), normalized over both classes"""
    log_odds = model.score(x)
    return expit(log_odds) if np.ndim(log_odds) else float(expit(log_odds))


def predict_nb(model: NbModel, x):
    return model.predict(x)

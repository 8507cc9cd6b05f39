"""
RBF Support Vector Machine

Soft-margin SVM on the dual problem

    min_a  1/2 a'Qa - e'a   s.t.  0 <= a_i <= C,  y'a = 0
    Q_ij = y_i y_j exp(-gamma ||x_i - x_j||^2)

solved by sequential minimal optimization. Each step updates the
maximal violating pair (i from I_up with the largest -y G, j from I_low
with the smallest), which is the pair with the largest error gap
|E_i - E_j|. Features are min-max scaled inside fit and the same scaling
is applied when scoring.
"""

import logging
from collections import OrderedDict
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.spatial.distance import cdist

from ..core.contract import TrainedModel
from ..core.errors import FitError
from ..core.rng import RngStream
from ..core.schema import Dataset

logger = logging.getLogger(__name__)

# Full kernel matrix up to this many rows, row cache above it
FULL_KERNEL_LIMIT = 3000
KERNEL_CACHE_MB = 256
SCORE_BLOCK_ROWS = 1024
TAU = 1e-12


class SvmHyper(BaseModel):
    """SVM hyperparameters; C is the box bound, gamma the RBF coefficient"""
    model_config = ConfigDict(frozen=True)

    C: float = Field(default=1.0, gt=0)
    gamma: float = Field(default=1.0, gt=0)
    tolerance: float = Field(default=1e-3, gt=0)
    max_passes: int = Field(default=100, ge=1)   # iteration budget = max_passes * rows


def rbf_kernel(x1, x2, gamma: float) -> float:
    """exp(-gamma * ||x1 - x2||^2)"""
    a = np.asarray(x1, dtype=np.float64).reshape(-1)
    b = np.asarray(x2, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise ValueError(f"Dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    diff = a - b
    return float(np.exp(-gamma * np.dot(diff, diff)))


def _kernel_block(A: np.ndarray, B: np.ndarray, gamma: float) -> np.ndarray:
    return np.exp(-gamma * cdist(A, B, metric="sqeuclidean"))


class _KernelRows:
    """Kernel rows on demand: precomputed for small problems, LRU-cached otherwise"""

    def __init__(self, X: np.ndarray, gamma: float):
        self.X = X
        self.gamma = gamma
        n = X.shape[0]
        self.full: Optional[np.ndarray] = None
        if n <= FULL_KERNEL_LIMIT:
            self.full = _kernel_block(X, X, gamma)
        self.capacity = max(2, (KERNEL_CACHE_MB << 20) // (8 * max(n, 1)))
        self.cache: "OrderedDict[int, np.ndarray]" = OrderedDict()

    def row(self, i: int) -> np.ndarray:
        if self.full is not None:
            return self.full[i]
        cached = self.cache.get(i)
        if cached is not None:
            self.cache.move_to_end(i)
            return cached
        row = _kernel_block(self.X[i:i + 1], self.X, self.gamma)[0]
        self.cache[i] = row
        if len(self.cache) > self.capacity:
            self.cache.popitem(last=False)
        return row


class SvmModel(TrainedModel):
    """
    Fitted SVM. score = sum_s coef_s k(sv_s, x) + bias on the scaled
    input; stroke when score >= 0.
    """

    algorithm = "svm"

    def __init__(
        self,
        support_vectors: np.ndarray,
        dual_coef: np.ndarray,
        bias: float,
        scale_min: np.ndarray,
        scale_span: np.ndarray,
        hyper: SvmHyper,
        converged: bool = True,
        iterations: int = 0,
        objective_history: Optional[List[float]] = None
    ):
        scale_min = np.asarray(scale_min, dtype=np.float64)
        super().__init__(n_features=scale_min.size, threshold=0.0)
        self.support_vectors = np.asarray(support_vectors, dtype=np.float64).reshape(-1, scale_min.size)
        self.dual_coef = np.asarray(dual_coef, dtype=np.float64)
        self.bias = float(bias)
        self.scale_min = scale_min
        self.scale_span = np.asarray(scale_span, dtype=np.float64)
        self.hyper = hyper
        self.converged = bool(converged)
        self.iterations = int(iterations)
        self.objective_history = tuple(objective_history or ())

    @property
    def support_count(self) -> int:
        return int(self.dual_coef.size)

    def scale(self, matrix: np.ndarray) -> np.ndarray:
        return (matrix - self.scale_min) / self.scale_span

    def _scores(self, matrix: np.ndarray) -> np.ndarray:
        scaled = self.scale(matrix)
        scores = np.empty(scaled.shape[0])
        for start in range(0, scaled.shape[0], SCORE_BLOCK_ROWS):
            block = scaled[start:start + SCORE_BLOCK_ROWS]
            scores[start:start + block.shape[0]] = (
                _kernel_block(block, self.support_vectors, self.hyper.gamma) @ self.dual_coef + self.bias
            )
        return scores

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "hyper": self.hyper.model_dump(),
            "support_vectors": self.support_vectors.tolist(),
            "dual_coef": self.dual_coef.tolist(),
            "bias": self.bias,
            "scale_min": self.scale_min.tolist(),
            "scale_span": self.scale_span.tolist(),
            "converged": self.converged,
            "iterations": self.iterations,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SvmModel":
        return cls(
            support_vectors=np.array(data["support_vectors"], dtype=np.float64),
            dual_coef=data["dual_coef"],
            bias=data["bias"],
            scale_min=data["scale_min"],
            scale_span=data["scale_span"],
            hyper=SvmHyper(**data["hyper"]),
            converged=data.get("converged", True),
            iterations=data.get("iterations", 0),
        )


def decision_function(model: SvmModel, x):
    """Signed distance proxy; positive on the stroke side"""
    return model.score(x)


def _compute_rho(alpha: np.ndarray, y: np.ndarray, G: np.ndarray, C: float) -> float:
    yG = y * G
    at_upper = alpha >= C
    at_lower = alpha <= 0
    free = ~(at_upper | at_lower)
    if free.any():
        return float(yG[free].mean())

    # No free vectors: midpoint of the feasible interval
    ub_mask = (at_upper & (y < 0)) | (at_lower & (y > 0))
    lb_mask = (at_upper & (y > 0)) | (at_lower & (y < 0))
    ub = yG[ub_mask].min() if ub_mask.any() else np.inf
    lb = yG[lb_mask].max() if lb_mask.any() else -np.inf
    return float((ub + lb) / 2.0)


def fit_svm(
    train: Dataset,
    hyper: SvmHyper,
    rng: Optional[RngStream] = None,
    track_objective: bool = False
) -> SvmModel:
    """
    Train by SMO until the maximal KKT violation drops below tolerance.

    The solver is deterministic; rng is accepted for the common fit
    signature. Running out of iterations returns the current solution
    with converged=False.
    """
    counts = train.class_counts()
    if counts[0] == 0 or counts[1] == 0:
        raise FitError(f"SVM needs both classes, got counts {counts}", algorithm="svm")

    X_raw = train.features
    scale_min = X_raw.min(axis=0)
    span = X_raw.max(axis=0) - scale_min
    scale_span = np.where(span > 0, span, 1.0)
    X = (X_raw - scale_min) / scale_span

    y = np.where(train.labels == 1, 1.0, -1.0)
    n = y.size
    C = hyper.C
    kernel = _KernelRows(X, hyper.gamma)

    alpha = np.zeros(n)
    G = -np.ones(n)
    history: List[float] = [0.0] if track_objective else []
    max_iter = hyper.max_passes * n
    converged = False
    iteration = 0

    while iteration < max_iter:
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        violation = -y * G
        i = int(np.argmax(np.where(up, violation, -np.inf)))
        j = int(np.argmin(np.where(low, violation, np.inf)))
        if violation[i] - violation[j] < hyper.tolerance:
            converged = True
            break

        iteration += 1
        K_i = kernel.row(i)
        K_j = kernel.row(j)
        quad = max(2.0 - 2.0 * K_i[j], TAU)   # K_ii = K_jj = 1 for RBF
        old_i, old_j = alpha[i], alpha[j]

        if y[i] != y[j]:
            delta = (-G[i] - G[j]) / quad
            diff = old_i - old_j
            alpha[i] += delta
            alpha[j] += delta
            if diff > 0:
                if alpha[j] < 0:
                    alpha[j] = 0.0
                    alpha[i] = diff
            elif alpha[i] < 0:
                alpha[i] = 0.0
                alpha[j] = -diff
            if diff > 0:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = C - diff
            elif alpha[j] > C:
                alpha[j] = C
                alpha[i] = C + diff
        else:
            delta = (G[i] - G[j]) / quad
            total = old_i + old_j
            alpha[i] -= delta
            alpha[j] += delta
            if total > C:
                if alpha[i] > C:
                    alpha[i] = C
                    alpha[j] = total - C
            elif alpha[j] < 0:
                alpha[j] = 0.0
                alpha[i] = total
            if total > C:
                if alpha[j] > C:
                    alpha[j] = C
                    alpha[i] = total - C
            elif alpha[i] < 0:
                alpha[i] = 0.0
                alpha[j] = total

        d_i = alpha[i] - old_i
        d_j = alpha[j] - old_j
        G += y * (y[i] * d_i * K_i + y[j] * d_j * K_j)

        if track_objective:
            # Dual objective W = -(1/2 a'Qa - e'a) = -(1/2 a'G - 1/2 sum a)
            history.append(float(-(0.5 * alpha @ G - 0.5 * alpha.sum())))

    if not converged:
        logger.warning(
            f"SMO stopped after {iteration} iterations without reaching tolerance "
            f"{hyper.tolerance} (C={C}, gamma={hyper.gamma})"
        )

    rho = _compute_rho(alpha, y, G, C)
    support = alpha > 0
    logger.debug(
        f"SVM fit: {int(support.sum())} support vectors of {n} rows, "
        f"{iteration} iterations, converged={converged}"
    )
    return SvmModel(
        support_vectors=X[support],
        dual_coef=alpha[support] * y[support],
        bias=-rho,
        scale_min=scale_min,
        scale_span=scale_span,
        hyper=hyper,
        converged=converged,
        iterations=iteration,
        objective_history=history,
    )

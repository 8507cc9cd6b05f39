"""
L2-regularized Logistic Regression

Penalized negative log-likelihood

    L(b) = sum_i [log(1 + e^z_i) - y_i z_i] + lam * sum_{j>=1} b_j^2,
    z_i = b_0 + b . x_i

minimized by one of three solvers:
- newton:   damped Newton-Raphson with an Armijo line search
- gradient: batch gradient descent with backtracking
- sag:      stochastic average gradient over shuffled mini-batches

The intercept is never penalized. Convergence means the gradient norm
||grad L|| is below tol.
"""

import logging
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import expit

from ..core.contract import TrainedModel
from ..core.errors import FitError
from ..core.rng import RngStream
from ..core.schema import Dataset

logger = logging.getLogger(__name__)

ARMIJO_C = 1e-4
MAX_HALVINGS = 60
SAG_BATCH_ROWS = 64


class Solver(str, Enum):
    NEWTON = "newton"
    GRADIENT = "gradient"
    SAG = "sag"


class RegConvention(str, Enum):
    LAMBDA = "lambda"     # grid value is the penalty weight itself
    INVERSE = "inverse"   # grid value is C, penalty weight 1 / (2C)


class LrHyper(BaseModel):
    """Logistic regression hyperparameters"""
    model_config = ConfigDict(frozen=True)

    reg: float = Field(default=1.0, gt=0)
    solver: Solver = Solver.NEWTON
    max_iter: int = Field(default=3000, ge=1)
    tol: float = Field(default=1e-6, gt=0)
    convention: RegConvention = RegConvention.LAMBDA

    @property
    def penalty(self) -> float:
        """Weight on the squared coefficient norm"""
        if self.convention == RegConvention.INVERSE:
            return 1.0 / (2.0 * self.reg)
        return self.reg


class LrModel(TrainedModel):
    """Fitted coefficients; score = z, stroke when z >= 0 (probability >= 0.5)"""

    algorithm = "lr"

    def __init__(
        self,
        intercept: float,
        coef,
        hyper: LrHyper,
        converged: bool,
        iterations: int,
        gradient_norm: float,
        loss_history: Optional[List[float]] = None
    ):
        coef = np.asarray(coef, dtype=np.float64).reshape(-1)
        super().__init__(n_features=coef.size, threshold=0.0)
        self.intercept = float(intercept)
        self.coef = coef
        self.hyper = hyper
        self.converged = bool(converged)
        self.iterations = int(iterations)
        self.gradient_norm = float(gradient_norm)
        self.loss_history = tuple(loss_history or ())

    @property
    def params(self) -> np.ndarray:
        return np.concatenate([[self.intercept], self.coef])

    def _scores(self, matrix: np.ndarray) -> np.ndarray:
        return self.intercept + matrix @ self.coef

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "hyper": self.hyper.model_dump(mode="json"),
            "intercept": self.intercept,
            "coef": self.coef.tolist(),
            "converged": self.converged,
            "iterations": self.iterations,
            "gradient_norm": self.gradient_norm,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LrModel":
        return cls(
            intercept=data["intercept"],
            coef=data["coef"],
            hyper=LrHyper(**data["hyper"]),
            converged=data["converged"],
            iterations=data["iterations"],
            gradient_norm=data.get("gradient_norm", float("nan")),
        )


def sigmoid_prob(model: LrModel, x):
    """e^z / (1 + e^z), overflow-safe"""
    z = model.score(x)
    return expit(z) if np.ndim(z) else float(expit(z))


# ============ Objective ============

def _augment(X: np.ndarray) -> np.ndarray:
    return np.hstack([np.ones((X.shape[0], 1)), X])


def _penalty_mask(size: int) -> np.ndarray:
    mask = np.ones(size)
    mask[0] = 0.0
    return mask


def _loss_grad(w: np.ndarray, Xa: np.ndarray, y: np.ndarray, lam: float) -> Tuple[float, np.ndarray]:
    z = Xa @ w
    beta = w[1:]
    loss = float(np.sum(np.logaddexp(0.0, z) - y * z) + lam * np.dot(beta, beta))
    grad = Xa.T @ (expit(z) - y) + 2.0 * lam * _penalty_mask(w.size) * w
    return loss, grad


def _loss(w: np.ndarray, Xa: np.ndarray, y: np.ndarray, lam: float) -> float:
    z = Xa @ w
    return float(np.sum(np.logaddexp(0.0, z) - y * z) + lam * np.dot(w[1:], w[1:]))


def loss_and_gradient(params, data: Dataset, reg: float) -> Tuple[float, np.ndarray]:
    """
    Penalized log loss and its analytic gradient.

    params is [intercept, coef_1, ..., coef_d]; reg is the penalty weight.
    """
    w = np.asarray(params, dtype=np.float64).reshape(-1)
    if w.size != data.column_count + 1:
        raise ValueError(f"Expected {data.column_count + 1} parameters, got {w.size}")
    return _loss_grad(w, _augment(data.features), data.labels.astype(np.float64), reg)


# ============ Solvers ============

def _line_search(w, direction, loss, slope, Xa, y, lam, step) -> Tuple[Optional[np.ndarray], float, float]:
    """Backtrack until the Armijo condition holds; None when no step decreases the loss"""
    for _ in range(MAX_HALVINGS):
        candidate = w + step * direction
        candidate_loss = _loss(candidate, Xa, y, lam)
        if candidate_loss <= loss + ARMIJO_C * step * slope:
            return candidate, candidate_loss, step
        step *= 0.5
    return None, loss, step


def _newton(Xa, y, lam, hyper, rng, history):
    w = np.zeros(Xa.shape[1])
    mask = _penalty_mask(w.size)
    loss, grad = _loss_grad(w, Xa, y, lam)
    history.append(loss)

    for iteration in range(1, hyper.max_iter + 1):
        if np.linalg.norm(grad) < hyper.tol:
            return w, grad, iteration - 1, True

        p = expit(Xa @ w)
        hessian = (Xa * (p * (1.0 - p))[:, None]).T @ Xa + np.diag(2.0 * lam * mask)
        try:
            direction = -np.linalg.solve(hessian, grad)
        except np.linalg.LinAlgError:
            direction = -np.linalg.lstsq(hessian, grad, rcond=None)[0]
        slope = float(grad @ direction)
        if slope >= 0:
            direction, slope = -grad, -float(grad @ grad)

        w_next, loss, _ = _line_search(w, direction, loss, slope, Xa, y, lam, 1.0)
        if w_next is None:
            logger.debug(f"Newton line search stalled at iteration {iteration}")
            return w, grad, iteration, bool(np.linalg.norm(grad) < hyper.tol)
        w = w_next
        loss, grad = _loss_grad(w, Xa, y, lam)
        history.append(loss)

    return w, grad, hyper.max_iter, bool(np.linalg.norm(grad) < hyper.tol)


def _gradient_descent(Xa, y, lam, hyper, rng, history):
    w = np.zeros(Xa.shape[1])
    loss, grad = _loss_grad(w, Xa, y, lam)
    history.append(loss)
    # 1 / Lipschitz bound of the full-batch gradient
    step = 1.0 / (0.25 * float(np.sum(Xa ** 2)) + 2.0 * lam)

    for iteration in range(1, hyper.max_iter + 1):
        if np.linalg.norm(grad) < hyper.tol:
            return w, grad, iteration - 1, True

        w_next, loss, used = _line_search(w, -grad, loss, -float(grad @ grad), Xa, y, lam, 2.0 * step)
        if w_next is None:
            return w, grad, iteration, bool(np.linalg.norm(grad) < hyper.tol)
        w, step = w_next, used
        loss, grad = _loss_grad(w, Xa, y, lam)
        history.append(loss)

    return w, grad, hyper.max_iter, bool(np.linalg.norm(grad) < hyper.tol)


def _sag(Xa, y, lam, hyper, rng, history):
    n = y.size
    w = np.zeros(Xa.shape[1])
    mask = _penalty_mask(w.size)
    step = 1.0 / (0.25 * float(np.max(np.sum(Xa ** 2, axis=1))) + 2.0 * lam / n)

    # Gradient memory starts from a full pass at w = 0
    memory = expit(Xa @ w) - y
    total = Xa.T @ memory
    loss, grad = _loss_grad(w, Xa, y, lam)
    history.append(loss)

    for epoch in range(1, hyper.max_iter + 1):
        if np.linalg.norm(grad) < hyper.tol:
            return w, grad, epoch - 1, True

        order = rng.permutation(n)
        for start in range(0, n, SAG_BATCH_ROWS):
            batch = order[start:start + SAG_BATCH_ROWS]
            fresh = expit(Xa[batch] @ w) - y[batch]
            total += Xa[batch].T @ (fresh - memory[batch])
            memory[batch] = fresh
            w = w - step * (total / n + (2.0 * lam / n) * mask * w)

        loss, grad = _loss_grad(w, Xa, y, lam)
        history.append(loss)

    return w, grad, hyper.max_iter, bool(np.linalg.norm(grad) < hyper.tol)


SOLVERS = {
    Solver.NEWTON: _newton,
    Solver.GRADIENT: _gradient_descent,
    Solver.SAG: _sag,
}


def fit_lr(train: Dataset, hyper: LrHyper, rng: RngStream) -> LrModel:
    """
    Minimize the penalized loss from the zero vector.

    Stops when the gradient norm drops below tol or after max_iter
    iterations (epochs for sag); converged reports which one happened.
    """
    counts = train.class_counts()
    if counts[0] == 0 or counts[1] == 0:
        raise FitError(f"Logistic regression needs both classes, got counts {counts}", algorithm="lr")

    Xa = _augment(train.features)
    y = train.labels.astype(np.float64)
    lam = hyper.penalty
    history: List[float] = []

    with np.errstate(over="ignore"):
        w, grad, iterations, converged = SOLVERS[Solver(hyper.solver)](Xa, y, lam, hyper, rng, history)

    gradient_norm = float(np.linalg.norm(grad))
    if not converged:
        logger.warning(
            f"LR solver '{Solver(hyper.solver).value}' did not converge in {iterations} iterations "
            f"(reg={hyper.reg}, gradient norm {gradient_norm:.3g})"
        )
    return LrModel(
        intercept=w[0],
        coef=w[1:],
        hyper=hyper,
        converged=converged,
        iterations=iterations,
        gradient_norm=gradient_norm,
        loss_history=history,
    )

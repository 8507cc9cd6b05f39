"""
Decision Tree and Random Forest

Binary threshold splits chosen by information gain (entropy) or Gini
gain. Candidate thresholds are midpoints between consecutive distinct
sorted values of a feature; rows with x <= threshold go left. Trees grow
until a node is pure, has fewer than 2 rows, or no split has positive
gain. Forests bag fully grown trees and vote.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import entr

from ..core.contract import TrainedModel
from ..core.errors import FitError
from ..core.rng import RngStream
from ..core.schema import Dataset

logger = logging.getLogger(__name__)

# Gains within this distance of zero count as no improvement
GAIN_EPS = 1e-12
PROB_SUM_TOL = 1e-9
LN2 = math.log(2.0)


class Criterion(str, Enum):
    GINI = "gini"
    ENTROPY = "entropy"


class MaxFeatures(str, Enum):
    NONE = "none"
    AUTO = "auto"     # same as sqrt
    SQRT = "sqrt"
    LOG2 = "log2"


class TreeHyper(BaseModel):
    """Decision tree hyperparameters"""
    model_config = ConfigDict(frozen=True)

    criterion: Criterion = Criterion.GINI
    max_features: MaxFeatures = MaxFeatures.NONE


class ForestHyper(BaseModel):
    """Random forest hyperparameters"""
    model_config = ConfigDict(frozen=True)

    n_estimators: int = Field(default=100, ge=1)
    criterion: Criterion = Criterion.GINI
    max_features: MaxFeatures = MaxFeatures.SQRT
    bootstrap: bool = True   # off only to compare a 1-tree forest with a plain tree


@dataclass(frozen=True)
class TreeNode:
    """Inspection view of one node; feature is None for leaves"""
    node_id: int
    feature: Optional[int]
    threshold: Optional[float]
    left: Optional[int]
    right: Optional[int]
    counts: Tuple[int, int]

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    @property
    def stroke_fraction(self) -> float:
        return self.counts[1] / sum(self.counts)

    @property
    def label(self) -> int:
        return int(self.counts[1] > self.counts[0])


@dataclass(frozen=True)
class SplitCandidate:
    feature: int
    threshold: float
    gain: float


# ============ Impurity ============

def _check_probs(class_probs: Sequence[float]) -> np.ndarray:
    probs = np.asarray(class_probs, dtype=np.float64)
    if (probs < 0).any():
        raise ValueError(f"Negative probability in {probs.tolist()}")
    if abs(probs.sum() - 1.0) > PROB_SUM_TOL:
        raise ValueError(f"Probabilities sum to {probs.sum()}, expected 1")
    return probs


def entropy(class_probs: Sequence[float]) -> float:
    """Shannon entropy in bits, with 0 * log 0 = 0"""
    probs = _check_probs(class_probs)
    return float(entr(probs).sum() / LN2)


def gini_impurity(class_probs: Sequence[float]) -> float:
    """1 minus the sum of squared class probabilities"""
    probs = _check_probs(class_probs)
    return float(1.0 - np.sum(probs ** 2))


def _impurity(n_stroke, n_total, criterion: Criterion):
    """Vectorized binary impurity from class-1 counts"""
    p = np.asarray(n_stroke, dtype=np.float64) / np.asarray(n_total, dtype=np.float64)
    if criterion == Criterion.ENTROPY:
        return (entr(p) + entr(1.0 - p)) / LN2
    return 1.0 - p ** 2 - (1.0 - p) ** 2


def split_gain(labels: Sequence[int], partition: Tuple[Sequence[int], Sequence[int]], criterion) -> float:
    """
    Parent impurity minus the size-weighted impurity of the two children.

    With the entropy criterion this is the information gain.
    """
    criterion = Criterion(criterion)
    labels = np.asarray(labels)
    left = np.asarray(partition[0], dtype=np.intp)
    right = np.asarray(partition[1], dtype=np.intp)
    if left.size == 0 or right.size == 0:
        raise ValueError("Split gain needs two non-empty sides")
    covered = np.concatenate([left, right])
    if covered.size != labels.size or not np.array_equal(np.sort(covered), np.arange(labels.size)):
        raise ValueError("Partition must be disjoint and cover every index exactly once")

    n = labels.size
    parent = _impurity(labels.sum(), n, criterion)
    children = (
        left.size * _impurity(labels[left].sum(), left.size, criterion)
        + right.size * _impurity(labels[right].sum(), right.size, criterion)
    ) / n
    return float(parent - children)


# ============ Split search ============

def _best_split(
    X: np.ndarray,
    y: np.ndarray,
    rows: np.ndarray,
    features: Sequence[int],
    criterion: Criterion
) -> Optional[SplitCandidate]:
    n = rows.size
    if n < 2:
        return None
    y_node = y[rows]
    n_stroke = int(y_node.sum())
    if n_stroke == 0 or n_stroke == n:
        return None

    parent = float(_impurity(n_stroke, n, criterion))
    left_sizes = np.arange(1, n)
    right_sizes = n - left_sizes

    best: Optional[SplitCandidate] = None
    for f in sorted(features):
        values = X[rows, f]
        order = np.argsort(values, kind="stable")
        xs = values[order]
        distinct = xs[:-1] < xs[1:]
        if not distinct.any():
            continue

        left_stroke = np.cumsum(y_node[order])[:-1]
        gains = parent - (
            left_sizes * _impurity(left_stroke, left_sizes, criterion)
            + right_sizes * _impurity(n_stroke - left_stroke, right_sizes, criterion)
        ) / n
        gains[~distinct] = -np.inf

        # gains within GAIN_EPS count as ties: lowest threshold, then lowest feature
        i = int(np.flatnonzero(gains >= gains.max() - GAIN_EPS)[0])
        if best is None or gains[i] > best.gain + GAIN_EPS:
            threshold = (xs[i] + xs[i + 1]) / 2.0
            if threshold >= xs[i + 1]:
                threshold = xs[i]
            best = SplitCandidate(feature=int(f), threshold=float(threshold), gain=float(gains[i]))

    if best is None or best.gain <= GAIN_EPS:
        return None
    return best


def best_split(
    data: Dataset,
    rows: Sequence[int],
    feature_subset: Sequence[int],
    criterion
) -> Optional[SplitCandidate]:
    """
    Highest-gain (feature, threshold) over the given rows and features.

    Ties go to the lower feature index, then the lower threshold. None
    when the node is pure or no split has positive gain.
    """
    return _best_split(
        data.features,
        data.labels.astype(np.int64),
        np.asarray(rows, dtype=np.intp),
        feature_subset,
        Criterion(criterion),
    )


def features_per_split(max_features: MaxFeatures, n_features: int) -> int:
    """Size of the random feature subset drawn at each node"""
    max_features = MaxFeatures(max_features)
    if max_features == MaxFeatures.NONE:
        return n_features
    if max_features in (MaxFeatures.AUTO, MaxFeatures.SQRT):
        k = math.ceil(math.sqrt(n_features))
    else:
        k = math.ceil(math.log2(n_features)) if n_features > 1 else 1
    return max(1, min(n_features, k))


# ============ Models ============

class TreeModel(TrainedModel):
    """
    Fitted decision tree stored as flat node arrays.

    score = fraction of stroke rows in the reached leaf; a leaf predicts
    stroke only with a strict stroke majority.
    """

    algorithm = "dt"

    def __init__(
        self,
        n_features: int,
        feature: np.ndarray,
        threshold: np.ndarray,
        left: np.ndarray,
        right: np.ndarray,
        counts: np.ndarray,
        hyper: Optional[TreeHyper] = None
    ):
        super().__init__(n_features=n_features, threshold=float(np.nextafter(0.5, 1.0)))
        self.feature = np.asarray(feature, dtype=np.intp)
        self.split_threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.intp)
        self.right = np.asarray(right, dtype=np.intp)
        self.counts = np.asarray(counts, dtype=np.int64).reshape(-1, 2)
        self.hyper = hyper or TreeHyper()
        self.stroke_fraction = self.counts[:, 1] / self.counts.sum(axis=1)
        for array in (self.feature, self.split_threshold, self.left, self.right, self.counts, self.stroke_fraction):
            array.setflags(write=False)

    @property
    def node_count(self) -> int:
        return int(self.feature.size)

    @property
    def depth(self) -> int:
        depths = np.zeros(self.node_count, dtype=np.intp)
        for node in range(self.node_count):
            if self.feature[node] >= 0:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max()) if self.node_count else 0

    def leaves_of(self, matrix: np.ndarray) -> np.ndarray:
        """Leaf node id reached by every row"""
        node = np.zeros(matrix.shape[0], dtype=np.intp)
        active = self.feature[node] >= 0
        while active.any():
            rows = np.flatnonzero(active)
            at = node[rows]
            go_left = matrix[rows, self.feature[at]] <= self.split_threshold[at]
            node[rows] = np.where(go_left, self.left[at], self.right[at])
            active[rows] = self.feature[node[rows]] >= 0
        return node

    def _scores(self, matrix: np.ndarray) -> np.ndarray:
        return self.stroke_fraction[self.leaves_of(matrix)]

    def nodes(self) -> List[TreeNode]:
        result = []
        for i in range(self.node_count):
            internal = self.feature[i] >= 0
            result.append(TreeNode(
                node_id=i,
                feature=int(self.feature[i]) if internal else None,
                threshold=float(self.split_threshold[i]) if internal else None,
                left=int(self.left[i]) if internal else None,
                right=int(self.right[i]) if internal else None,
                counts=(int(self.counts[i, 0]), int(self.counts[i, 1])),
            ))
        return result

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "n_features": self.n_features,
            "hyper": self.hyper.model_dump(mode="json"),
            "nodes": [
                {
                    "id": node.node_id,
                    "feature": node.feature,
                    "threshold": node.threshold,
                    "left": node.left,
                    "right": node.right,
                    "counts": list(node.counts),
                }
                for node in self.nodes()
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TreeModel":
        nodes = data["nodes"]
        return cls(
            n_features=data["n_features"],
            feature=[-1 if n["feature"] is None else n["feature"] for n in nodes],
            threshold=[np.nan if n["threshold"] is None else n["threshold"] for n in nodes],
            left=[-1 if n["left"] is None else n["left"] for n in nodes],
            right=[-1 if n["right"] is None else n["right"] for n in nodes],
            counts=[n["counts"] for n in nodes],
            hyper=TreeHyper(**data.get("hyper", {})),
        )


class ForestModel(TrainedModel):
    """
    Bagged trees. score = fraction of trees voting stroke; stroke is
    predicted only with a strict vote majority (ties go to no stroke).
    """

    algorithm = "rf"

    def __init__(self, trees: List[TreeModel], hyper: Optional[ForestHyper] = None):
        if not trees:
            raise ValueError("A forest needs at least one tree")
        n = len(trees)
        super().__init__(n_features=trees[0].n_features, threshold=(n // 2 + 1) / n)
        self.trees = tuple(trees)
        self.hyper = hyper or ForestHyper(n_estimators=n)

    def votes(self, matrix: np.ndarray) -> np.ndarray:
        votes = np.zeros(matrix.shape[0], dtype=np.int64)
        for tree in self.trees:
            votes += tree.predict(matrix)
        return votes

    def _scores(self, matrix: np.ndarray) -> np.ndarray:
        return self.votes(matrix) / len(self.trees)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "n_features": self.n_features,
            "hyper": self.hyper.model_dump(mode="json"),
            "trees": [tree.to_dict() for tree in self.trees],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ForestModel":
        return cls(
            trees=[TreeModel.from_dict(tree) for tree in data["trees"]],
            hyper=ForestHyper(**data["hyper"]),
        )


# ============ Fitting ============

def _grow(X: np.ndarray, y: np.ndarray, hyper: TreeHyper, rng: Optional[RngStream]) -> TreeModel:
    n_features = X.shape[1]
    subset_size = features_per_split(hyper.max_features, n_features)
    all_features = np.arange(n_features)

    feature: List[int] = []
    threshold: List[float] = []
    left: List[int] = []
    right: List[int] = []
    counts: List[Tuple[int, int]] = []

    def new_node(rows: np.ndarray) -> int:
        n_stroke = int(y[rows].sum())
        feature.append(-1)
        threshold.append(np.nan)
        left.append(-1)
        right.append(-1)
        counts.append((rows.size - n_stroke, n_stroke))
        return len(feature) - 1

    root_rows = np.arange(X.shape[0])
    stack = [(new_node(root_rows), root_rows)]
    while stack:
        node, rows = stack.pop()
        n_stroke = counts[node][1]
        if rows.size < 2 or n_stroke == 0 or n_stroke == rows.size:
            continue

        if subset_size < n_features:
            drawn = rng.choice(n_features, size=subset_size, replace=False)
            split = _best_split(X, y, rows, drawn, hyper.criterion)
            if split is None:
                # Keep searching the undrawn features before giving up on the node
                rest = np.setdiff1d(all_features, drawn)
                split = _best_split(X, y, rows, rest, hyper.criterion)
        else:
            split = _best_split(X, y, rows, all_features, hyper.criterion)
        if split is None:
            continue

        goes_left = X[rows, split.feature] <= split.threshold
        left_rows, right_rows = rows[goes_left], rows[~goes_left]
        feature[node] = split.feature
        threshold[node] = split.threshold
        left[node] = new_node(left_rows)
        right[node] = new_node(right_rows)
        stack.append((right[node], right_rows))
        stack.append((left[node], left_rows))

    return TreeModel(
        n_features=n_features,
        feature=np.array(feature),
        threshold=np.array(threshold),
        left=np.array(left),
        right=np.array(right),
        counts=np.array(counts),
        hyper=hyper,
    )


def fit_tree(train: Dataset, hyper: TreeHyper, rng: RngStream) -> TreeModel:
    """Grow one unpruned tree on the training rows"""
    if train.row_count == 0:
        raise FitError("Cannot fit a tree on an empty dataset", algorithm="dt")
    tree = _grow(train.features, train.labels.astype(np.int64), hyper, rng)
    logger.debug(f"Grew tree with {tree.node_count} nodes (depth {tree.depth})")
    return tree


def _fit_member(X: np.ndarray, y: np.ndarray, hyper: ForestHyper, rng: RngStream, index: int) -> TreeModel:
    stream = rng.child(f"tree-{index}")
    if hyper.bootstrap:
        rows = stream.integers(0, X.shape[0], size=X.shape[0])
        X, y = X[rows], y[rows]
    tree_hyper = TreeHyper(criterion=hyper.criterion, max_features=hyper.max_features)
    return _grow(X, y, tree_hyper, stream)


def fit_forest(train: Dataset, hyper: ForestHyper, rng: RngStream, n_jobs: int = 1) -> ForestModel:
    """
    Train n_estimators trees, each on a bootstrap sample of n rows drawn
    with replacement from its own child stream "tree-<index>".
    """
    if train.row_count == 0:
        raise FitError("Cannot fit a forest on an empty dataset", algorithm="rf")

    X = train.features
    y = train.labels.astype(np.int64)
    if n_jobs == 1:
        trees = [_fit_member(X, y, hyper, rng, t) for t in range(hyper.n_estimators)]
    else:
        trees = Parallel(n_jobs=n_jobs)(
            delayed(_fit_member)(X, y, hyper, rng, t) for t in range(hyper.n_estimators)
        )
    return ForestModel(trees=list(trees), hyper=hyper)

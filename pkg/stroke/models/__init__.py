"""Classifiers: decision tree, random forest, RBF SVM, Gaussian naive Bayes, logistic regression"""

from .bayes import NbModel, fit_nb, posterior, predict_nb
from .logreg import LrHyper, LrModel, RegConvention, Solver, fit_lr, loss_and_gradient, sigmoid_prob
from .registry import ALGORITHMS, GRIDS, LearnerOptions, fit_model, make_hyper, model_from_dict
from .svm import SvmHyper, SvmModel, decision_function, fit_svm, rbf_kernel
from .tree import (
    ForestHyper,
    ForestModel,
    TreeHyper,
    TreeModel,
    TreeNode,
    best_split,
    entropy,
    fit_forest,
    fit_tree,
    gini_impurity,
    split_gain,
)

__all__ = [
    "ALGORITHMS",
    "GRIDS",
    "LearnerOptions",
    "fit_model",
    "make_hyper",
    "model_from_dict",
    "TreeHyper",
    "TreeNode",
    "TreeModel",
    "ForestHyper",
    "ForestModel",
    "entropy",
    "gini_impurity",
    "split_gain",
    "best_split",
    "fit_tree",
    "fit_forest",
    "SvmHyper",
    "SvmModel",
    "rbf_kernel",
    "fit_svm",
    "decision_function",
    "NbModel",
    "fit_nb",
    "posterior",
    "predict_nb",
    "LrHyper",
    "LrModel",
    "Solver",
    "RegConvention",
    "sigmoid_prob",
    "loss_and_gradient",
    "fit_lr",
]

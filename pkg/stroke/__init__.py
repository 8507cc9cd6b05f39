"""
Stroke Prediction Pipeline

Tabular binary classification of stroke risk:
- CSV ingestion, label encoding and missing-value handling
- SMOTE balancing of the minority (stroke) class
- Decision tree, random forest, RBF SVM, Gaussian naive Bayes, logistic regression
- Grid search, stratified k-fold evaluation and imbalance-aware metrics
"""

__version__ = "1.0.0"

__all__ = ["__version__"]

"""Metrics, stratified CV, extraction-parameter grid search, mask-source comparison, PCA."""

from .crossval import CVResult, UnsupervisedResult, cross_validate, fit_on, kmeans_unsupervised
from .folds import stratified_kfold
from .grid import GRID_CSV_HEADER, GridResult, evaluate_config, evaluate_methods, grid_csv_rows, grid_search, rank
from .metrics import METRIC_NAMES, ConfusionCounts, MetricSet, confusion, metrics, score, summarize_folds
from .pca import PCAResult, pca_project
from .robustness import MaskComparison, compare_mask_sources, dilate_mask

__all__ = [
    "CVResult", "UnsupervisedResult", "cross_validate", "fit_on", "kmeans_unsupervised",
    "stratified_kfold",
    "GRID_CSV_HEADER", "GridResult", "evaluate_config", "evaluate_methods", "grid_csv_rows", "grid_search", "rank",
    "METRIC_NAMES", "ConfusionCounts", "MetricSet", "confusion", "metrics", "score", "summarize_folds",
    "PCAResult", "pca_project",
    "MaskComparison", "compare_mask_sources", "dilate_mask",
]

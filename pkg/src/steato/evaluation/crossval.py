from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyDataset
from ..learners import fit_classifier, fit_scaler
from .folds import stratified_kfold
from .metrics import score, summarize_folds


@dataclass
class CVResult:
    method: str
    folds: list
    mean: object
    std: object
    predictions: np.ndarray
    fold_of: np.ndarray
    models: list = field(default_factory=list, repr=False)

    def to_dict(self):
        return {
            "protocol": "stratified-cv" if self.method != "kmeans" else "stratified-cv (nearest-centroid on held-out rows)",
            "folds": [m.to_dict() for m in self.folds],
            "mean": self.mean.to_dict(),
            "std": self.std.to_dict(),
        }


@dataclass
class UnsupervisedResult:
    metrics: object
    predictions: np.ndarray
    model: object

    def to_dict(self):
        return {
            "protocol": "unsupervised fit on all patients",
            "metrics": self.metrics.to_dict(),
            "fatty_cluster": self.model.fatty_cluster,
        }


def fit_on(spec, X, y, raw_mean_distance):
    """Scale with training statistics, then fit. Returns ``(scaler, model)``."""
    scaler = fit_scaler(X)
    model = fit_classifier(spec, scaler.transform(X), y, raw_mean_distance)
    return scaler, model


def cross_validate(ds, spec, k=5, seed=0, keep_models=False):
    """Stratified k-fold CV on the labelled rows of ``ds``.

    Scaler and model see training rows only. K-Means names its fatty cluster from
    training members and labels held-out rows by nearest centroid.
    """
    ds = ds.labeled()
    if len(ds) == 0:
        raise EmptyDataset("no labelled patients to cross-validate")
    folds = stratified_kfold(ds.y, k, seed)
    preds = np.full(len(ds), -1, dtype=int)
    fold_of = np.full(len(ds), -1, dtype=int)
    fold_metrics, models = [], []
    for f, test in enumerate(folds):
        train = np.setdiff1d(np.arange(len(ds)), test) if k > 1 else test
        scaler, model = fit_on(spec, ds.X[train], ds.y[train], ds.raw_mean_distance[train])
        p = model.predict(scaler.transform(ds.X[test]))
        preds[test] = p
        fold_of[test] = f
        fold_metrics.append(score(ds.y[test], p))
        if keep_models:
            models.append((scaler, model))
    mean, std = summarize_folds(fold_metrics)
    return CVResult(spec.kind, fold_metrics, mean, std, preds, fold_of, models)


def kmeans_unsupervised(ds, spec):
    """Cluster every patient (labelled or not); score against the labelled ones."""
    if len(ds) == 0:
        raise EmptyDataset("no patients to cluster")
    scaler, model = fit_on(spec, ds.X, None, ds.raw_mean_distance)
    preds = model.predict(scaler.transform(ds.X))
    lab = ds.labeled_mask
    if not lab.any():
        raise EmptyDataset("no labelled patients to score the clustering against")
    return UnsupervisedResult(score(ds.y[lab], preds[lab]), preds, model)

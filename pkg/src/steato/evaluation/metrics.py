from dataclasses import asdict, dataclass

import numpy as np

from ..errors import EmptyConfusion, LengthMismatch

METRIC_NAMES = ("accuracy", "precision", "recall", "f1", "kappa")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricSet:
    accuracy: float
    precision: float
    recall: float
    f1: float
    kappa: float

    def to_dict(self):
        return asdict(self)


def confusion(y_true, y_pred):
    """Counts with Fatty (1) as the positive class."""
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if y_true.shape != y_pred.shape:
        raise LengthMismatch(f"{y_true.shape[0]} true labels vs {y_pred.shape[0]} predictions")
    if np.any((y_true != 0) & (y_true != 1)) or np.any((y_pred != 0) & (y_pred != 1)):
        raise ValueError("labels must be 0 or 1")
    return ConfusionCounts(
        tp=int(np.sum((y_true == 1) & (y_pred == 1))),
        fp=int(np.sum((y_true == 0) & (y_pred == 1))),
        fn=int(np.sum((y_true == 1) & (y_pred == 0))),
        tn=int(np.sum((y_true == 0) & (y_pred == 0))),
    )


def metrics(c):
    """Accuracy, precision, recall, F1 and Cohen's kappa.

    Undefined ratios are 0. When chance agreement is total, kappa is 1 for perfect
    agreement and 0 otherwise.
    """
    n = c.total
    if n <= 0:
        raise EmptyConfusion("no evaluated samples")
    acc = (c.tp + c.tn) / n
    prec = c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0
    rec = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
    p_e = ((c.tp + c.fp) * (c.tp + c.fn) + (c.fn + c.tn) * (c.fp + c.tn)) / (n * n)
    if p_e == 1.0:
        kappa = 1.0 if acc == 1.0 else 0.0
    else:
        kappa = (acc - p_e) / (1 - p_e)
    return MetricSet(acc, prec, rec, f1, kappa)


def score(y_true, y_pred):
    return metrics(confusion(y_true, y_pred))


def summarize_folds(folds):
    """Mean and population std of each metric across folds."""
    table = np.array([[getattr(m, k) for k in METRIC_NAMES] for m in folds])
    return MetricSet(*table.mean(0)), MetricSet(*table.std(0))

"""Patient-level learners and a small spec-driven front end."""

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .kmeans import KMeansModel, identify_fatty_cluster, kmeans_fit
from .knn import KNNModel, knn_predict
from .logreg import LogRegModel, logreg_fit, logreg_loss_grad
from .scaling import Scaler, apply_scaler, fit_scaler
from .svm import SVMModel, dual_objective, kernel_matrix, svm_fit

METHODS = ("kmeans", "knn", "logreg", "svm-linear", "svm-rbf")


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    k: int = 5
    lam: float = 1e-2
    lr: float = 0.1
    iters: int = 2000
    C: float = 1.0
    gamma: Optional[float] = None  # None -> 1 / n_features
    tol: float = 1e-3
    max_passes: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.kind not in METHODS:
            raise ValueError(f"unknown method {self.kind!r}; choose from {', '.join(METHODS)}")
        for name in ("k", "iters", "max_passes"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("lr", "C", "tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if self.gamma is not None and self.gamma <= 0:
            raise ValueError("gamma must be > 0")

    @property
    def unsupervised(self):
        return self.kind == "kmeans"

    def to_dict(self):
        d = asdict(self)
        keep = {
            "kmeans": ("seed",),
            "knn": ("k",),
            "logreg": ("lam", "lr", "iters"),
            "svm-linear": ("C", "tol", "max_passes", "seed"),
            "svm-rbf": ("C", "gamma", "tol", "max_passes", "seed"),
        }[self.kind]
        return {"kind": self.kind, **{k: d[k] for k in keep}}


def fit_classifier(spec, X, y=None, raw_mean_distance=None):
    """Fit one model on already-scaled features.

    K-Means ignores ``y`` and needs ``raw_mean_distance`` to name its fatty cluster.
    """
    X = np.asarray(X, dtype=np.float64)
    if spec.kind == "kmeans":
        model = kmeans_fit(X, seed=spec.seed)
        model.fatty_cluster = identify_fatty_cluster(model, raw_mean_distance)
        return model
    y = np.asarray(y, dtype=int)
    if spec.kind == "knn":
        return KNNModel(X, y, spec.k)
    if spec.kind == "logreg":
        return logreg_fit(X, y, spec.lam, spec.lr, spec.iters)
    kernel = "linear" if spec.kind == "svm-linear" else "rbf"
    return svm_fit(X, y, kernel=kernel, C=spec.C, tol=spec.tol, max_passes=spec.max_passes,
                   seed=spec.seed, gamma=spec.gamma)


__all__ = [
    "METHODS", "ClassifierSpec", "fit_classifier",
    "Scaler", "fit_scaler", "apply_scaler",
    "KMeansModel", "kmeans_fit", "identify_fatty_cluster",
    "KNNModel", "knn_predict",
    "LogRegModel", "logreg_fit", "logreg_loss_grad",
    "SVMModel", "svm_fit", "kernel_matrix", "dual_objective",
]

from dataclasses import dataclass

import numpy as np

from ..errors import EmptyDataset


@dataclass(frozen=True)
class Scaler:
    mean: np.ndarray
    scale: np.ndarray  # population std; 0 marks a constant column

    def transform(self, X):
        X = np.asarray(X, dtype=np.float64)
        safe = np.where(self.scale > 0, self.scale, 1.0)
        return np.where(self.scale > 0, (X - self.mean) / safe, 0.0)


def fit_scaler(X_train):
    X = np.asarray(X_train, dtype=np.float64)
    if X.ndim != 2 or len(X) == 0:
        raise EmptyDataset("cannot fit a scaler on an empty training set")
    return Scaler(X.mean(0), X.std(0))


def apply_scaler(scaler, X):
    return scaler.transform(X)

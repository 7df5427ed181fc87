from dataclasses import dataclass

import numpy as np

from ..errors import EmptyDataset


def knn_predict(X_train, y_train, x, k=5):
    """Majority vote of the ``k`` nearest training rows (L2).

    Equal distances keep the lower training index; a tied vote goes to Fatty (1).
    ``x`` may be one sample or a matrix of samples.
    """
    X_train = np.asarray(X_train, dtype=np.float64)
    y_train = np.asarray(y_train, dtype=int)
    if len(X_train) == 0:
        raise EmptyDataset("KNN needs at least one training row")
    if not 1 <= k <= len(X_train):
        raise ValueError(f"k={k} must lie in [1, {len(X_train)}]")
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    queries = x[None] if single else x
    out = np.empty(len(queries), dtype=int)
    for q, row in enumerate(queries):
        d = np.sqrt(((X_train - row) ** 2).sum(1))
        nearest = np.argsort(d, kind="stable")[:k]
        fatty = int(y_train[nearest].sum())
        out[q] = 1 if 2 * fatty >= k else 0
    return int(out[0]) if single else out


@dataclass
class KNNModel:
    X: np.ndarray
    y: np.ndarray
    k: int = 5

    def predict(self, X):
        return knn_predict(self.X, self.y, np.atleast_2d(X), self.k)

    def to_dict(self):
        return {"kind": "knn", "k": self.k, "X": self.X.tolist(), "y": self.y.tolist()}

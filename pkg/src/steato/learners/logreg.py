from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from ..errors import SingleClassTraining


def logreg_loss_grad(w, b, X, y, lam):
    """Mean negative log-likelihood plus ``lam/2 * ||w||^2`` (bias unpenalised),
    with its gradient ``(dw, db)``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = X @ w + b
    loss = np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * lam * float(w @ w)
    r = expit(z) - y
    return loss, X.T @ r / len(y) + lam * w, float(r.mean())


@dataclass
class LogRegModel:
    w: np.ndarray
    b: float
    loss_history: list = field(default_factory=list, repr=False)

    def predict_proba(self, X):
        return expit(np.asarray(X, dtype=np.float64) @ self.w + self.b)

    def predict(self, X):
        return (self.predict_proba(X) >= 0.5).astype(int)

    def to_dict(self):
        return {"kind": "logreg", "weights": self.w.tolist(), "bias": float(self.b)}


def logreg_fit(X, y, lam=1e-2, lr=0.1, iters=2000):
    """Full-batch gradient descent from zero weights."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(np.unique(y)) < 2:
        raise SingleClassTraining("logistic regression needs both classes in the training set")
    w = np.zeros(X.shape[1])
    b = 0.0
    history = []
    for _ in range(iters):
        loss, gw, gb = logreg_loss_grad(w, b, X, y, lam)
        history.append(float(loss))
        w = w - lr * gw
        b = b - lr * gb
    history.append(float(logreg_loss_grad(w, b, X, y, lam)[0]))
    return LogRegModel(w, b, history)

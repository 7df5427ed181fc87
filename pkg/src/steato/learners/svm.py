"""Soft-margin SVM trained on the dual with sequential minimal optimisation."""

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import NonConvergenceWarning, SingleClassTraining


def kernel_matrix(A, B, kernel="linear", gamma=None):
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if kernel == "linear":
        return A @ B.T
    if kernel == "rbf":
        if gamma is None or gamma <= 0:
            raise ValueError("RBF kernel needs gamma > 0")
        return np.exp(-gamma * cdist(A, B, metric="sqeuclidean"))
    raise ValueError(f"unknown kernel {kernel!r}")


def dual_objective(alpha, y_pm, K):
    """``sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij`` (to be maximised)."""
    ay = alpha * y_pm
    return float(alpha.sum() - 0.5 * ay @ K @ ay)


@dataclass
class SVMModel:
    kernel: str
    gamma: Optional[float]
    C: float
    alpha: np.ndarray  # one per training row
    b: float
    X: np.ndarray
    y_pm: np.ndarray  # labels mapped to -1/+1
    converged: bool = True
    n_iter: int = 0

    @property
    def support(self):
        return np.flatnonzero(self.alpha > 0)

    def decision_function(self, X):
        sv = self.support
        K = kernel_matrix(np.atleast_2d(X), self.X[sv], self.kernel, self.gamma)
        return K @ (self.alpha[sv] * self.y_pm[sv]) + self.b

    def predict(self, X):
        return (self.decision_function(X) >= 0).astype(int)

    def to_dict(self):
        sv = self.support
        return {
            "kind": f"svm-{self.kernel}",
            "kernel": self.kernel,
            "gamma": self.gamma,
            "C": self.C,
            "b": float(self.b),
            "support_vectors": self.X[sv].tolist(),
            "alpha": self.alpha[sv].tolist(),
            "y": self.y_pm[sv].astype(int).tolist(),
            "converged": self.converged,
        }


def svm_fit(X, y, kernel="linear", C=1.0, tol=1e-3, max_passes=10, seed=0, gamma=None, max_iter=10_000):
    """Fit by pairwise alpha updates.

    Each sweep visits every alpha that violates the KKT conditions by more than
    ``tol`` and pairs it first with the partner maximising ``|E_i - E_j|``, then with
    the remaining partners in seeded random order. Training stops after
    ``max_passes`` consecutive sweeps without a change, or after ``max_iter`` sweeps
    (then ``converged`` is False and a warning is emitted).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if len(np.unique(y)) < 2:
        raise SingleClassTraining("SVM needs both classes in the training set")
    if kernel == "rbf" and gamma is None:
        gamma = 1.0 / X.shape[1]
    y_pm = np.where(y == 1, 1.0, -1.0)
    n = len(X)
    K = kernel_matrix(X, X, kernel, gamma)
    rng = np.random.default_rng(seed)

    alpha = np.zeros(n)
    b = 0.0
    f = np.zeros(n)  # decision values without bias

    def step(i, j):
        nonlocal b
        if i == j:
            return False
        ai, aj = alpha[i], alpha[j]
        yi, yj = y_pm[i], y_pm[j]
        Ei, Ej = f[i] + b - yi, f[j] + b - yj
        if yi != yj:
            L, H = max(0.0, aj - ai), min(C, C + aj - ai)
        else:
            L, H = max(0.0, ai + aj - C), min(C, ai + aj)
        if H - L < 1e-12:
            return False
        eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
        if eta < 0:
            aj_new = min(H, max(L, aj - yj * (Ei - Ej) / eta))
        else:
            # flat or degenerate direction: take the better end of the segment
            def obj_at(a_j):
                a_i = ai + yi * yj * (aj - a_j)
                trial = alpha.copy()
                trial[i], trial[j] = a_i, a_j
                return dual_objective(trial, y_pm, K)

            lo, hi = obj_at(L), obj_at(H)
            if abs(lo - hi) < 1e-12:
                return False
            aj_new = L if lo > hi else H
        if abs(aj_new - aj) < 1e-12 * (aj_new + aj + 1e-12):
            return False
        ai_new = ai + yi * yj * (aj - aj_new)
        dai, daj = ai_new - ai, aj_new - aj
        b1 = b - Ei - yi * dai * K[i, i] - yj * daj * K[i, j]
        b2 = b - Ej - yi * dai * K[i, j] - yj * daj * K[j, j]
        alpha[i], alpha[j] = ai_new, aj_new
        f[:] += yi * dai * K[:, i] + yj * daj * K[:, j]
        if 0 < ai_new < C:
            b = b1
        elif 0 < aj_new < C:
            b = b2
        else:
            b = 0.5 * (b1 + b2)
        return True

    passes = 0
    sweeps = 0
    converged = True
    while passes < max_passes:
        if sweeps >= max_iter:
            converged = False
            break
        sweeps += 1
        changed = 0
        for i in range(n):
            Ei = f[i] + b - y_pm[i]
            r = y_pm[i] * Ei
            if not ((r < -tol and alpha[i] < C) or (r > tol and alpha[i] > 0)):
                continue
            E = f + b - y_pm
            first = int(np.argmax(np.abs(Ei - E)))
            for j in [first, *rng.permutation(n)]:
                if step(i, j):
                    changed += 1
                    break
        passes = passes + 1 if changed == 0 else 0

    alpha = np.clip(alpha, 0.0, C)
    free = (alpha > 1e-12) & (alpha < C - 1e-12)
    if free.any():
        b = float(np.mean(y_pm[free] - f[free]))
    if not converged:
        warnings.warn(f"SMO stopped after {sweeps} sweeps with KKT violations above tol={tol}",
                      NonConvergenceWarning, stacklevel=2)
    return SVMModel(kernel, gamma, C, alpha, float(b), X, y_pm, converged, sweeps)

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateData


@dataclass
class PCAResult:
    projections: np.ndarray  # n x components
    components: np.ndarray  # components x d, unit rows
    eigenvalues: np.ndarray
    variance_explained: np.ndarray
    mean: np.ndarray


def _leading_eigenpair(C, v0, tol, max_iter):
    v = v0 / np.linalg.norm(v0)
    for _ in range(max_iter):
        w = C @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0, v
        w /= norm
        if w @ v < 0:  # keep a consistent direction so the change test is meaningful
            w = -w
        done = np.linalg.norm(w - v) < tol
        v = w
        if done:
            break
    return float(v @ C @ v), v


def pca_project(X, components=2, tol=1e-10, max_iter=10_000, seed=0):
    """Leading principal axes of the population covariance by power iteration with
    deflation. Each axis is signed so its first nonzero loading is positive.
    """
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    if n < 2:
        raise DegenerateData("PCA needs at least two samples")
    if not 1 <= components <= d:
        raise ValueError(f"components must lie in [1, {d}]")
    mean = X.mean(0)
    Xc = X - mean
    C = Xc.T @ Xc / n
    total = float(np.trace(C))
    if total <= 0:
        raise DegenerateData("data has zero total variance")

    rng = np.random.default_rng(seed)
    deflated = C.copy()
    vecs, vals = [], []
    for _ in range(components):
        lam, v = _leading_eigenpair(deflated, rng.standard_normal(d), tol, max_iter)
        nz = np.flatnonzero(np.abs(v) > 1e-12)
        if nz.size and v[nz[0]] < 0:
            v = -v
        vecs.append(v)
        vals.append(max(lam, 0.0))
        deflated = deflated - lam * np.outer(v, v)
    V = np.array(vecs)
    vals = np.array(vals)
    return PCAResult(Xc @ V.T, V, vals, vals / total, mean)

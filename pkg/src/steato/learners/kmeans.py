from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import EmptyCluster, TooFewSamples


@dataclass
class KMeansModel:
    centroids: np.ndarray
    inertia: float
    labels: np.ndarray
    n_iter: int
    inertia_history: list = field(default_factory=list)
    fatty_cluster: Optional[int] = None

    def assign(self, X):
        """Index of the nearest centroid (ties go to the lower index)."""
        return _sq_dists(np.asarray(X, dtype=np.float64), self.centroids).argmin(1)

    def predict(self, X):
        if self.fatty_cluster is None:
            raise ValueError("fatty_cluster not identified; call identify_fatty_cluster first")
        return (self.assign(X) == self.fatty_cluster).astype(int)

    def to_dict(self):
        return {
            "kind": "kmeans",
            "centroids": self.centroids.tolist(),
            "inertia": float(self.inertia),
            "fatty_cluster": self.fatty_cluster,
        }


def _sq_dists(X, C):
    return ((X[:, None, :] - C[None, :, :]) ** 2).sum(-1)


def _plusplus(X, k, rng):
    n = len(X)
    centers = [X[rng.integers(n)]]
    for _ in range(1, k):
        d2 = _sq_dists(X, np.array(centers)).min(1)
        total = d2.sum()
        idx = rng.integers(n) if total <= 0 else rng.choice(n, p=d2 / total)
        centers.append(X[idx])
    return np.array(centers, dtype=np.float64)


def _lloyd(X, centroids, max_iter, tol):
    history = []
    for it in range(1, max_iter + 1):
        d2 = _sq_dists(X, centroids)
        labels = d2.argmin(1)
        history.append(float(d2[np.arange(len(X)), labels].sum()))
        new = centroids.copy()
        for c in range(len(centroids)):
            members = labels == c
            if members.any():
                new[c] = X[members].mean(0)
            else:
                # reseed with the point lying farthest from its own centroid
                own = d2[np.arange(len(X)), labels]
                far = int(own.argmax())
                new[c] = X[far]
                labels[far] = c
        shift = np.sqrt(((new - centroids) ** 2).sum(1)).max()
        centroids = new
        if shift < tol:
            break
    d2 = _sq_dists(X, centroids)
    labels = d2.argmin(1)
    inertia = float(d2[np.arange(len(X)), labels].sum())
    history.append(inertia)
    return centroids, labels, inertia, it, history


def kmeans_fit(X, seed=0, k=2, n_init=10, max_iter=300, tol=1e-6):
    """k-means++ seeding, ``n_init`` restarts seeded ``seed + r``; lowest inertia wins."""
    X = np.asarray(X, dtype=np.float64)
    if len(X) < k:
        raise TooFewSamples(f"k-means with k={k} needs at least {k} samples, got {len(X)}")
    best = None
    for r in range(n_init):
        rng = np.random.default_rng(seed + r)
        centroids, labels, inertia, n_iter, history = _lloyd(X, _plusplus(X, k, rng), max_iter, tol)
        if best is None or inertia < best.inertia:
            best = KMeansModel(centroids, inertia, labels, n_iter, history)
    return best


def identify_fatty_cluster(model, raw_mean_distance, assignments=None):
    """Cluster whose members have the smaller average raw mean fat-pancreas distance.

    Ties resolve to cluster 0.
    """
    labels = model.labels if assignments is None else np.asarray(assignments)
    dist = np.asarray(raw_mean_distance, dtype=np.float64)
    if len(dist) != len(labels):
        raise ValueError(f"{len(dist)} distances for {len(labels)} assignments")
    averages = []
    for c in range(len(model.centroids)):
        members = labels == c
        if not members.any():
            raise EmptyCluster(f"cluster {c} has no members")
        averages.append(dist[members].mean())
    return int(np.argmin(averages))

"""Patient-level summary of fat-vs-pancreas patch similarity."""

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DimensionMismatch, NoPatches
from .texture import feature_names

DIST_NAMES = ("dist_mean", "dist_std", "dist_median", "dist_p10", "dist_p90")
NN_NAMES = ("nn_mean", "nn_std", "close_frac")
N_SUMMARY = len(DIST_NAMES) + len(NN_NAMES)


def patient_feature_names(bins):
    return list(DIST_NAMES) + list(NN_NAMES) + [f"diff_{n}" for n in feature_names(bins)]


def _as_matrix(rows):
    m = np.asarray(rows, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(0, 0) if m.size == 0 else m[None]
    return m


def standardize_patches(fat, panc):
    """Z-score both sets with the mean and population std of the pooled patches.

    Dimensions with zero spread map to 0.
    """
    fat, panc = _as_matrix(fat), _as_matrix(panc)
    if len(fat) == 0 or len(panc) == 0:
        raise NoPatches(f"need fat and pancreas patches (got {len(fat)} fat, {len(panc)} pancreas)")
    if fat.shape[1] != panc.shape[1]:
        raise DimensionMismatch(f"feature lengths differ: {fat.shape[1]} vs {panc.shape[1]}")
    pooled = np.vstack([fat, panc])
    mu = pooled.mean(0)
    sigma = pooled.std(0)
    safe = np.where(sigma > 0, sigma, 1.0)

    def z(m):
        return np.where(sigma > 0, (m - mu) / safe, 0.0)

    return z(fat), z(panc)


def pairwise_distances(fat_z, panc_z):
    """``D[i, j] = ||fat_z[i] - panc_z[j]||_2``."""
    fat_z, panc_z = _as_matrix(fat_z), _as_matrix(panc_z)
    if len(fat_z) == 0 or len(panc_z) == 0:
        raise NoPatches("empty patch set")
    if fat_z.shape[1] != panc_z.shape[1]:
        raise DimensionMismatch(f"feature lengths differ: {fat_z.shape[1]} vs {panc_z.shape[1]}")
    return cdist(fat_z, panc_z, metric="euclidean")


def aggregate_patient(dist, fat_z, panc_z):
    """Concatenate distance statistics, nearest-neighbour statistics and the mean
    feature difference (fat minus pancreas) into one vector of length ``14 + B``.
    """
    dist = np.asarray(dist, dtype=np.float64)
    fat_z, panc_z = _as_matrix(fat_z), _as_matrix(panc_z)
    if dist.shape != (len(fat_z), len(panc_z)):
        raise DimensionMismatch(f"distance matrix {dist.shape} does not match {len(fat_z)}x{len(panc_z)} patches")
    entries = dist.ravel()
    p10, p25, median, p90 = np.percentile(entries, [10, 25, 50, 90])
    nearest = dist.min(axis=1)
    summary = [
        entries.mean(), entries.std(), median, p10, p90,
        nearest.mean(), nearest.std(), float(np.mean(nearest < p25)),
    ]
    return np.concatenate([summary, fat_z.mean(0) - panc_z.mean(0)])


def delta_mu(fat_patches, panc_patches):
    """Absolute gap between mean pancreas and mean fat pixel intensity."""
    if len(fat_patches) == 0 or len(panc_patches) == 0:
        raise NoPatches("delta_mu needs at least one fat and one pancreas patch")

    def pixel_mean(patches):
        total = count = 0
        for p in patches:
            px = np.asarray(getattr(p, "pixels", p), dtype=np.float64)
            total += px.sum()
            count += px.size
        return total / count

    return abs(pixel_mean(panc_patches) - pixel_mean(fat_patches))

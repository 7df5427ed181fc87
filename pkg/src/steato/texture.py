"""Per-patch intensity and texture descriptors.

Every function accepts a single patch (``Patch`` or 2-D array) or a stack of
shape ``(n, s, s)`` and returns a scalar/array accordingly. 3x3 stencils use
replicate (edge-clamp) padding; all variances are population variances.
"""

import numpy as np

from .errors import InvalidBinCount

N_SCALAR = 6
SCALAR_NAMES = ("mean", "std", "median", "lap_var", "local_contrast", "grad_mean")

LAPLACIAN = np.array([[0, 1, 0], [1, -4, 1], [0, 1, 0]], dtype=float)
SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=float)
SOBEL_Y = SOBEL_X.T


def feature_names(bins):
    return list(SCALAR_NAMES) + [f"hist{k}" for k in range(bins)]


def _stack(patch):
    arr = getattr(patch, "pixels", patch)
    arr = np.asarray(arr, dtype=np.float64)
    single = arr.ndim == 2
    return (arr[None] if single else arr), single


def _out(values, single):
    return values[0] if single else values


def _shifts(p):
    """The nine replicate-padded 3x3 neighbours, keyed by (dy, dx) in {0,1,2}^2."""
    s_h, s_w = p.shape[1:]
    padded = np.pad(p, ((0, 0), (1, 1), (1, 1)), mode="edge")
    return {(dy, dx): padded[:, dy:dy + s_h, dx:dx + s_w] for dy in range(3) for dx in range(3)}


def _correlate3(p, kernel, shifts=None):
    shifts = shifts if shifts is not None else _shifts(p)
    out = np.zeros_like(p)
    for (dy, dx), view in shifts.items():
        k = kernel[dy, dx]
        if k:
            out += k * view
    return out


def intensity_stats(patch):
    """(mean, population std, median)."""
    p, single = _stack(patch)
    flat = p.reshape(len(p), -1)
    stats = np.stack([flat.mean(1), flat.std(1), np.median(flat, axis=1)], axis=1)
    return tuple(stats[0]) if single else stats


def intensity_histogram(patch, bins):
    if not (1 <= bins <= 256) or 256 % bins:
        raise InvalidBinCount(f"bins must divide 256, got {bins}")
    p, single = _stack(patch)
    flat = p.reshape(len(p), -1).astype(np.int64)
    idx = flat // (256 // bins)
    counts = np.zeros((len(p), bins))
    np.add.at(counts, (np.repeat(np.arange(len(p)), flat.shape[1]), idx.ravel()), 1.0)
    return _out(counts / flat.shape[1], single)


def laplacian_variance(patch):
    p, single = _stack(patch)
    resp = _correlate3(p, LAPLACIAN)
    return _out(resp.reshape(len(p), -1).var(1), single)


def local_contrast_mean(patch):
    p, single = _stack(patch)
    views = list(_shifts(p).values())
    mean = sum(views) / 9.0
    var = sum((v - mean) ** 2 for v in views) / 9.0
    return _out(np.sqrt(var).reshape(len(p), -1).mean(1), single)


def gradient_magnitude_mean(patch):
    p, single = _stack(patch)
    shifts = _shifts(p)
    gx = _correlate3(p, SOBEL_X, shifts)
    gy = _correlate3(p, SOBEL_Y, shifts)
    return _out(np.hypot(gx, gy).reshape(len(p), -1).mean(1), single)


def patch_features(patch, bins):
    """``[mean, std, median, lap_var, local_contrast, grad_mean, hist_0..hist_{B-1}]``."""
    p, single = _stack(patch)
    if len(p) == 0:
        return np.empty((0, N_SCALAR + bins))
    feats = np.column_stack([
        intensity_stats(p),
        laplacian_variance(p),
        local_contrast_mean(p),
        gradient_magnitude_mean(p),
        intensity_histogram(p, bins),
    ])
    return _out(feats, single)

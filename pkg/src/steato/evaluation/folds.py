import numpy as np

from ..errors import TooFewPerClass


def stratified_kfold(y, k=5, seed=0):
    """Per class, shuffle indices with ``seed`` and deal them round-robin into ``k`` folds.

    Dealing continues across classes from the fold after the last one used, which
    keeps fold sizes within one of each other. Returns ``k`` sorted index arrays.
    """
    y = np.asarray(y)
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(seed)
    folds = [[] for _ in range(k)]
    start = 0
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        if len(idx) < k:
            raise TooFewPerClass(f"class {cls} has {len(idx)} members, fewer than k={k}")
        idx = rng.permutation(idx)
        for pos, i in enumerate(idx):
            folds[(start + pos) % k].append(int(i))
        start = (start + len(idx)) % k
    return [np.array(sorted(f), dtype=int) for f in folds]

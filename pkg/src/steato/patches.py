"""Grid patch extraction from the pancreas parenchyma and the fat band below the splenic vein."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatch, EmptyVeinMask, InvalidBinCount, InvalidConfig


@dataclass(frozen=True)
class ExtractionConfig:
    patch_size: int = 3
    fat_depth: int = 20
    bins: int = 32

    def __post_init__(self):
        if int(self.patch_size) != self.patch_size or self.patch_size < 1:
            raise InvalidConfig(f"patch_size must be a positive integer, got {self.patch_size}")
        if int(self.fat_depth) != self.fat_depth or self.fat_depth < 1:
            raise InvalidConfig(f"fat_depth must be a positive integer, got {self.fat_depth}")
        if not (1 <= self.bins <= 256) or 256 % self.bins:
            raise InvalidBinCount(f"bins must divide 256, got {self.bins}")

    def to_dict(self):
        return {"s": self.patch_size, "delta": self.fat_depth, "bins": self.bins}


class Region(str, Enum):
    PANCREAS = "pancreas"
    FAT = "fat"


@dataclass(frozen=True, eq=False)
class Patch:
    x: int
    y: int
    size: int
    pixels: np.ndarray
    region: Region

    @property
    def origin(self):
        return (self.x, self.y)


def _check_shapes(*arrays):
    shapes = {np.shape(a) for a in arrays}
    if len(shapes) != 1:
        raise DimensionMismatch(f"raster shapes differ: {sorted(shapes)}")


def grid_origins(valid, anchor, s):
    """Top-left corners ``(x, y)`` of the ``s``-stride grid anchored at ``anchor``'s
    bounding-box corner whose whole ``s x s`` window lies in ``valid``. Row-major order.
    """
    valid = np.asarray(valid, dtype=bool)
    anchor = np.asarray(anchor, dtype=bool)
    h, w = valid.shape
    rows = np.flatnonzero(anchor.any(axis=1))
    cols = np.flatnonzero(anchor.any(axis=0))
    if rows.size == 0:
        return np.empty((0, 2), dtype=int)
    ys = np.arange(rows[0], min(rows[-1], h - s) + 1, s)
    xs = np.arange(cols[0], min(cols[-1], w - s) + 1, s)
    if ys.size == 0 or xs.size == 0:
        return np.empty((0, 2), dtype=int)

    sat = np.zeros((h + 1, w + 1), dtype=np.int64)
    sat[1:, 1:] = valid.cumsum(0).cumsum(1)
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    counts = sat[yy + s, xx + s] - sat[yy, xx + s] - sat[yy + s, xx] + sat[yy, xx]
    keep = counts == s * s
    return np.stack([xx[keep], yy[keep]], axis=1)


def pancreas_origins(pancreas, vein, s):
    _check_shapes(pancreas, vein)
    pancreas = np.asarray(pancreas, dtype=bool)
    return grid_origins(pancreas & ~np.asarray(vein, dtype=bool), pancreas, s)


def fat_origins(region, pancreas, vein, s):
    _check_shapes(region, pancreas, vein)
    region = np.asarray(region, dtype=bool)
    valid = region & ~np.asarray(pancreas, dtype=bool) & ~np.asarray(vein, dtype=bool)
    return grid_origins(valid, region, s)


def fat_region(vein, delta):
    """Pixels within ``delta`` rows below the lowest vein pixel of each column."""
    vein = np.asarray(vein, dtype=bool)
    if not vein.any():
        raise EmptyVeinMask("vein mask has no foreground pixels")
    h = vein.shape[0]
    has_vein = vein.any(axis=0)
    y_bottom = h - 1 - np.argmax(vein[::-1], axis=0)
    rows = np.arange(h)[:, None]
    return has_vein & (rows > y_bottom) & (rows <= y_bottom + delta)


def patch_stack(img, origins, s):
    """Gather patches into an ``(n, s, s)`` array."""
    img = np.asarray(img)
    origins = np.asarray(origins, dtype=int).reshape(-1, 2)
    off = np.arange(s)
    ys = origins[:, 1, None, None] + off[None, :, None]
    xs = origins[:, 0, None, None] + off[None, None, :]
    return img[ys, xs]


def _to_patches(img, origins, s, region):
    stack = patch_stack(img, origins, s)
    return [Patch(int(x), int(y), s, px, region) for (x, y), px in zip(origins, stack)]


def pancreas_patches(img, pancreas, vein, cfg):
    _check_shapes(img, pancreas, vein)
    s = cfg.patch_size
    return _to_patches(img, pancreas_origins(pancreas, vein, s), s, Region.PANCREAS)


def fat_patches(img, region, pancreas, vein, cfg):
    _check_shapes(img, region, pancreas, vein)
    s = cfg.patch_size
    return _to_patches(img, fat_origins(region, pancreas, vein, s), s, Region.FAT)


def patch_dump(patient_id, cfg, pancreas_xy, fat_xy):
    """JSON-ready record of patch locations for overlay/audit tools."""
    return {
        "patient_id": patient_id,
        "config": cfg.to_dict(),
        "pancreas_patches": [{"x": int(x), "y": int(y)} for x, y in np.asarray(pancreas_xy).reshape(-1, 2)],
        "fat_patches": [{"x": int(x), "y": int(y)} for x, y in np.asarray(fat_xy).reshape(-1, 2)],
    }

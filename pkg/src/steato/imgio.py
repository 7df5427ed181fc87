"""Image, mask, annotation and manifest I/O.

Grayscale images are ``uint8`` arrays of shape ``(height, width)``; binary masks
are ``bool`` arrays of the same shape. Row-major order, ``img[y, x]``.
"""

import csv
import json
import os
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    DecodeError,
    DuplicatePatientId,
    InvalidDimensions,
    InvalidPolygon,
    ManifestParseError,
)

MANIFEST_COLUMNS = ("patient_id", "image_path", "pancreas_mask_path", "vein_mask_path", "label")


class Structure(str, Enum):
    PANCREAS = "pancreas"
    SPLENIC_VEIN = "splenic_vein"


class Label(int, Enum):
    NORMAL = 0
    FATTY = 1

    @classmethod
    def parse(cls, text):
        text = text.strip().lower()
        if text == "":
            return None
        if text == "normal":
            return cls.NORMAL
        if text == "fatty":
            return cls.FATTY
        raise ValueError(f"unknown label {text!r}")

    def __str__(self):
        return self.name.lower()


@dataclass(frozen=True)
class PolygonAnnotation:
    structure: Structure
    vertices: tuple  # ((x, y), ...) in sub-pixel coordinates


@dataclass(frozen=True)
class PatientRecord:
    patient_id: str
    image_path: str
    pancreas_mask_path: str
    vein_mask_path: str
    label: Optional[Label] = None


def _open(path):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    try:
        im = Image.open(path)
        im.load()
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise DecodeError(f"cannot decode {path}: {exc}") from exc
    return im


def _to_gray(im, path):
    if im.mode == "L":
        return np.asarray(im, dtype=np.uint8).copy()
    if im.mode == "1":
        return np.asarray(im.convert("L"), dtype=np.uint8).copy()
    if im.mode in ("P", "PA"):
        im = im.convert("RGBA" if "transparency" in im.info or im.mode == "PA" else "RGB")
    if im.mode == "LA":
        return np.asarray(im, dtype=np.uint8)[..., 0].copy()
    if im.mode in ("RGB", "RGBA", "RGBX"):
        rgb = np.asarray(im, dtype=np.int64)[..., :3]
        # ITU-R 601 weights in integer thousandths, rounded half-up
        luma = (299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2] + 500) // 1000
        return luma.astype(np.uint8)
    raise DecodeError(f"{path}: unsupported image mode {im.mode!r} (8-bit images only)")


def load_gray_image(path):
    """Load an 8-bit image as a ``uint8`` array; colour input is reduced to luma."""
    return _to_gray(_open(path), path)


def save_gray_image(img, path):
    img = np.asarray(img)
    if img.dtype != np.uint8:
        raise DecodeError(f"expected uint8 image, got {img.dtype}")
    Image.fromarray(img).save(path, format="PNG")


def load_mask(path):
    """Any nonzero byte decodes as foreground."""
    return load_gray_image(path) != 0


def save_mask(mask, path):
    save_gray_image(np.where(np.asarray(mask, dtype=bool), 255, 0).astype(np.uint8), path)


def _validate_polygon(poly):
    pts = np.asarray(poly.vertices, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise InvalidPolygon(f"{poly.structure}: polygon needs >= 3 (x, y) vertices")
    if not np.all(np.isfinite(pts)):
        raise InvalidPolygon(f"{poly.structure}: non-finite vertex coordinate")
    return pts


def rasterize_polygon(poly, width, height):
    """Even-odd fill tested at pixel centres; centres on an edge count as inside.

    Zero-area polygons produce an empty mask.
    """
    if width <= 0 or height <= 0:
        raise InvalidDimensions(f"invalid raster size {width}x{height}")
    pts = _validate_polygon(poly)
    pts[:, 0] = np.clip(pts[:, 0], 0, width)
    pts[:, 1] = np.clip(pts[:, 1], 0, height)

    x0, y0 = pts[:, 0], pts[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    if abs(np.sum(x0 * y1 - x1 * y0)) == 0.0:
        return np.zeros((height, width), dtype=bool)

    px, py = np.meshgrid(np.arange(width) + 0.5, np.arange(height) + 0.5)
    inside = np.zeros((height, width), dtype=bool)
    on_edge = np.zeros((height, width), dtype=bool)
    scale = max(width, height)
    for ax, ay, bx, by in zip(x0, y0, x1, y1):
        straddles = (ay > py) != (by > py)
        if np.any(straddles):
            with np.errstate(divide="ignore", invalid="ignore"):
                x_cross = ax + (py - ay) * (bx - ax) / (by - ay)
            inside ^= straddles & (px < x_cross)
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        on_edge |= (
            (np.abs(cross) <= 1e-9 * scale)
            & (px >= min(ax, bx)) & (px <= max(ax, bx))
            & (py >= min(ay, by)) & (py <= max(ay, by))
        )
    return inside | on_edge


def load_annotations(path):
    """Read ``[{"structure": ..., "points": [[x, y], ...]}, ...]``."""
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, list):
        raise InvalidPolygon(f"{path}: expected a JSON list of polygon objects")
    polys = []
    for i, obj in enumerate(raw):
        try:
            structure = Structure(obj["structure"])
            verts = tuple((float(x), float(y)) for x, y in obj["points"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidPolygon(f"{path}: polygon {i} malformed ({exc})") from exc
        polys.append(PolygonAnnotation(structure, verts))
    return polys


def rasterize_annotations(polys, width, height):
    """Union of all polygons per structure, keyed by :class:`Structure`."""
    out = {s: np.zeros((height, width), dtype=bool) for s in Structure}
    for poly in polys:
        out[poly.structure] |= rasterize_polygon(poly, width, height)
    return out


def _source_coords(n_out, n_in):
    # half-pixel-centre alignment
    c = (np.arange(n_out) + 0.5) * (n_in / n_out) - 0.5
    c = np.clip(c, 0, n_in - 1)
    lo = np.floor(c).astype(int)
    hi = np.minimum(lo + 1, n_in - 1)
    return lo, hi, c - lo


def resize(img, target_w, target_h):
    """Bilinear for ``uint8`` images (rounded), nearest-neighbour for ``bool`` masks."""
    if target_w <= 0 or target_h <= 0:
        raise InvalidDimensions(f"invalid target size {target_w}x{target_h}")
    img = np.asarray(img)
    h, w = img.shape
    if img.dtype == bool:
        ys = np.minimum(np.floor((np.arange(target_h) + 0.5) * h / target_h).astype(int), h - 1)
        xs = np.minimum(np.floor((np.arange(target_w) + 0.5) * w / target_w).astype(int), w - 1)
        return img[np.ix_(ys, xs)]

    y_lo, y_hi, fy = _source_coords(target_h, h)
    x_lo, x_hi, fx = _source_coords(target_w, w)
    f = img.astype(np.float64)
    top = f[y_lo][:, x_lo] * (1 - fx) + f[y_lo][:, x_hi] * fx
    bot = f[y_hi][:, x_lo] * (1 - fx) + f[y_hi][:, x_hi] * fx
    out = top * (1 - fy)[:, None] + bot * fy[:, None]
    return np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)


def load_manifest(path):
    """Parse a patient manifest CSV. Relative paths resolve against the manifest's folder."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    base = path.parent
    records, seen = [], {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ManifestParseError(1, "empty file") from None
        if tuple(h.strip() for h in header) != MANIFEST_COLUMNS:
            raise ManifestParseError(1, f"header must be {','.join(MANIFEST_COLUMNS)}")
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(MANIFEST_COLUMNS):
                raise ManifestParseError(row_no, f"expected {len(MANIFEST_COLUMNS)} fields, got {len(row)}")
            pid, img, panc, vein, label = (c.strip() for c in row)
            if not pid:
                raise ManifestParseError(row_no, "empty patient_id")
            if pid in seen:
                raise DuplicatePatientId(pid, row_no)
            try:
                label = Label.parse(label)
            except ValueError as exc:
                raise ManifestParseError(row_no, str(exc)) from None
            seen[pid] = row_no
            records.append(PatientRecord(
                pid,
                str(_resolve(base, img)),
                str(_resolve(base, panc)),
                str(_resolve(base, vein)),
                label,
            ))
    return records


def _resolve(base, p):
    p = Path(p)
    return p if p.is_absolute() else base / p


def write_manifest(records, path):
    """Write records; paths are stored relative to the manifest folder when possible."""
    path = Path(path)
    base = path.parent.resolve()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MANIFEST_COLUMNS)
        for r in records:
            paths = []
            for p in (r.image_path, r.pancreas_mask_path, r.vein_mask_path):
                p = Path(p)
                try:
                    p = p.resolve().relative_to(base)
                except ValueError:
                    pass
                paths.append(p.as_posix() if not p.is_absolute() else os.fspath(p))
            w.writerow([r.patient_id, *paths, "" if r.label is None else str(r.label)])


"""Turn loaded patients into patient-level feature matrices for one extraction config."""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, EmptyVeinMask, NoPatches, PipelineError
from .imgio import load_gray_image, load_mask
from .patches import fat_origins, fat_region, pancreas_origins, patch_stack
from .patientvec import aggregate_patient, pairwise_distances, standardize_patches
from .texture import patch_features


def worker_count():
    """Thread cap from ``STEATO_THREADS`` (default: CPU count)."""
    raw = os.environ.get("STEATO_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def parallel_map(fn, items, threads=None):
    items = list(items)
    threads = min(threads or worker_count(), max(1, len(items)))
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass
class Case:
    patient_id: str
    image: np.ndarray
    pancreas: np.ndarray
    vein: np.ndarray
    label: Optional[int] = None


def load_case(record):
    """Read one manifest record; failures name the patient and the offending path."""
    paths = (record.image_path, record.pancreas_mask_path, record.vein_mask_path)
    for p in paths:
        if not os.path.isfile(p):
            raise PipelineError("load", f"patient {record.patient_id}: missing file {p}",
                                patient_id=record.patient_id, path=str(p))
    try:
        image = load_gray_image(paths[0])
        pancreas = load_mask(paths[1])
        vein = load_mask(paths[2])
    except Exception as exc:
        raise PipelineError("load", f"patient {record.patient_id}: {exc}", patient_id=record.patient_id) from exc
    if not (image.shape == pancreas.shape == vein.shape):
        raise PipelineError("load", f"patient {record.patient_id}: image and masks differ in size",
                            patient_id=record.patient_id)
    label = None if record.label is None else int(record.label)
    return Case(record.patient_id, image, pancreas, vein, label)


def load_cases(records, threads=None):
    return parallel_map(load_case, records, threads)


def cases_from_phantoms(cohort):
    return [Case(pid, c.image, c.pancreas_mask, c.vein_mask, int(c.label))
            for pid, c in zip(cohort.ids, cohort.cases)]


@dataclass
class PatientSummary:
    patient_id: str
    vector: np.ndarray
    raw_mean_distance: float
    pancreas_xy: np.ndarray
    fat_xy: np.ndarray
    pancreas_features: np.ndarray = field(repr=False, default=None)
    fat_features: np.ndarray = field(repr=False, default=None)


def summarize(image, pancreas, vein, cfg, patient_id=""):
    """Full per-patient chain: extraction, descriptors, standardisation, distances, aggregation."""
    if not (np.shape(image) == np.shape(pancreas) == np.shape(vein)):
        raise DimensionMismatch("image and masks differ in size")
    s = cfg.patch_size
    p_xy = pancreas_origins(pancreas, vein, s)
    f_xy = fat_origins(fat_region(vein, cfg.fat_depth), pancreas, vein, s)
    if len(p_xy) == 0 or len(f_xy) == 0:
        raise NoPatches(f"{len(f_xy)} fat / {len(p_xy)} pancreas patches")
    p_feat = patch_features(patch_stack(image, p_xy, s), cfg.bins)
    f_feat = patch_features(patch_stack(image, f_xy, s), cfg.bins)
    f_z, p_z = standardize_patches(f_feat, p_feat)
    dist = pairwise_distances(f_z, p_z)
    vec = aggregate_patient(dist, f_z, p_z)
    return PatientSummary(patient_id, vec, float(vec[0]), p_xy, f_xy, p_feat, f_feat)


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray  # -1 marks an unlabelled patient
    ids: list
    raw_mean_distance: np.ndarray

    def __len__(self):
        return len(self.ids)

    @property
    def labeled_mask(self):
        return self.y >= 0

    def subset(self, mask):
        idx = np.flatnonzero(mask) if np.asarray(mask).dtype == bool else np.asarray(mask)
        return Dataset(self.X[idx], self.y[idx], [self.ids[i] for i in idx], self.raw_mean_distance[idx])

    def labeled(self):
        return self.subset(self.labeled_mask)


def build_dataset(cases, cfg, threads=None, keep_summaries=False):
    """Summarise every case. Cases without usable patches are skipped, not fatal.

    Returns ``(dataset, skipped, summaries)`` where ``skipped`` lists
    ``(patient_id, reason)`` and ``summaries`` is empty unless requested.
    """
    def one(case):
        try:
            return summarize(case.image, case.pancreas, case.vein, cfg, case.patient_id), None
        except (NoPatches, EmptyVeinMask) as exc:
            return None, str(exc)
        except DimensionMismatch as exc:
            raise PipelineError("extract", f"patient {case.patient_id}: {exc}", patient_id=case.patient_id) from exc

    results = parallel_map(one, cases, threads)
    rows, labels, ids, dists, skipped, summaries = [], [], [], [], [], []
    for case, (summary, reason) in zip(cases, results):
        if summary is None:
            skipped.append((case.patient_id, reason))
            continue
        rows.append(summary.vector)
        labels.append(-1 if case.label is None else int(case.label))
        ids.append(case.patient_id)
        dists.append(summary.raw_mean_distance)
        if keep_summaries:
            summaries.append(summary)
    d = 14 + cfg.bins
    X = np.array(rows, dtype=np.float64).reshape(len(rows), d)
    ds = Dataset(X, np.array(labels, dtype=int), ids, np.array(dists, dtype=np.float64))
    return ds, skipped, summaries

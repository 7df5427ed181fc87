"""End-to-end runs: manifest in, JSON/CSV reports out."""

import csv
import json
from pathlib import Path

import numpy as np

from . import __version__
from .cohort import build_dataset, load_cases
from .errors import EmptyDataset, PipelineError
from .evaluation import (
    GRID_CSV_HEADER,
    compare_mask_sources,
    cross_validate,
    dilate_mask,
    evaluate_methods,
    fit_on,
    grid_csv_rows,
    grid_search,
    pca_project,
)
from .imgio import load_manifest
from .learners import fit_scaler
from .patches import patch_dump
from .patientvec import patient_feature_names

NOTES = {
    "std": "population standard deviation across folds",
    "kmeans": "unsupervised entry clusters all patients; its cross_validation entry fits on training "
              "folds and labels held-out patients by nearest centroid",
    "scaling": "patient features standardised with training-fold statistics only",
}


def dump_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _fmt(v):
    return repr(float(v))


def write_patient_vectors(path, ds, bins):
    n = 14 + bins
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["patient_id", "label", *[f"g{i}" for i in range(n)]])
        for pid, label, row in zip(ds.ids, ds.y, ds.X):
            w.writerow([pid, _label_text(label), *map(_fmt, row)])


def write_patch_features(path, summaries, bins):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["patient_id", "region", "x", "y", *[f"f{i}" for i in range(6 + bins)]])
        for s in summaries:
            for region, xy, feats in (("pancreas", s.pancreas_xy, s.pancreas_features),
                                      ("fat", s.fat_xy, s.fat_features)):
                for (x, y), row in zip(xy, feats):
                    w.writerow([s.patient_id, region, int(x), int(y), *map(_fmt, row)])


def _label_text(label):
    return {0: "normal", 1: "fatty"}.get(int(label), "")


def _load(cfg):
    if not cfg.manifest:
        raise PipelineError("config", "no manifest given")
    try:
        records = load_manifest(cfg.manifest)
    except FileNotFoundError as exc:
        raise PipelineError("manifest", str(exc), path=str(cfg.manifest)) from exc
    return load_cases(records)


def _out_dir(cfg):
    if not cfg.out:
        raise PipelineError("config", "no output directory given")
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def run_pipeline(cfg, cases=None):
    """Extraction, descriptors, aggregation and classification for one configuration.

    Writes ``report.json``, ``patient_vectors.csv`` and ``models.json`` (models refit on
    all labelled patients), plus ``patch_features.csv`` / ``patches/*.json`` on request.
    Returns the report dict.
    """
    cfg.validate()
    out = _out_dir(cfg)
    cases = _load(cfg) if cases is None else cases
    ext = cfg.extraction
    keep = cfg.patch_features or cfg.patch_dump
    ds, skipped, summaries = build_dataset(cases, ext, keep_summaries=keep)
    if len(ds) == 0:
        raise PipelineError("extract", "no patient yielded both fat and pancreas patches")

    specs = cfg.classifier_specs()
    labeled = ds.labeled()
    methods = {}
    models = {}
    _, _, errors, details = evaluate_methods(ds, specs, cfg.seed, cfg.cv_folds)
    for spec in specs:
        entry = {"spec": spec.to_dict()}
        if spec.kind in errors:
            entry["error"] = errors[spec.kind]
        if spec.unsupervised:
            if spec.kind in details:
                entry["unsupervised"] = details[spec.kind].to_dict()
                models[spec.kind] = details[spec.kind].model.to_dict()
            try:
                entry["cross_validation"] = cross_validate(ds, spec, cfg.cv_folds, cfg.seed).to_dict()
            except (ValueError, EmptyDataset) as exc:
                entry["cross_validation_error"] = f"{type(exc).__name__}: {exc}"
        elif spec.kind in details:
            entry["cross_validation"] = details[spec.kind].to_dict()
            scaler, model = fit_on(spec, labeled.X, labeled.y, labeled.raw_mean_distance)
            models[spec.kind] = {**model.to_dict(), "scaler_mean": scaler.mean.tolist(),
                                 "scaler_scale": scaler.scale.tolist()}
        methods[spec.kind] = entry

    report = {
        "tool": "steato",
        "version": __version__,
        "run_config": cfg.to_dict(),
        "seed": cfg.seed,
        "extraction": ext.to_dict(),
        "feature_names": patient_feature_names(ext.bins),
        "patients_total": len(cases),
        "patients_evaluated": len(ds),
        "patients_labeled": int(ds.labeled_mask.sum()),
        "skipped_patients": [{"patient_id": pid, "reason": why} for pid, why in skipped],
        "methods": methods,
        "notes": NOTES,
    }
    dump_json(report, out / "report.json")
    dump_json(models, out / "models.json")
    write_patient_vectors(out / "patient_vectors.csv", ds, ext.bins)
    if cfg.patch_features:
        write_patch_features(out / "patch_features.csv", summaries, ext.bins)
    if cfg.patch_dump:
        (out / "patches").mkdir(exist_ok=True)
        for s in summaries:
            dump_json(patch_dump(s.patient_id, ext, s.pancreas_xy, s.fat_xy), out / "patches" / f"{s.patient_id}.json")
    return report


def run_grid(cfg, s_grid, delta_grid, bins_grid, cases=None, progress=None):
    """Grid search written to ``grid.json`` and ``grid.csv``."""
    cfg.validate()
    out = _out_dir(cfg)
    cases = _load(cfg) if cases is None else cases
    specs = cfg.classifier_specs()
    results = grid_search(cases, s_grid, delta_grid, bins_grid, specs, cfg.seed, cfg.cv_folds, progress=progress)
    dump_json({
        "run_config": cfg.to_dict(),
        "grid": {"s": list(s_grid), "delta": list(delta_grid), "bins": list(bins_grid)},
        "cells": [r.to_dict() for r in results],
        "notes": NOTES,
    }, out / "grid.json")
    with open(out / "grid.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(GRID_CSV_HEADER)
        w.writerows(grid_csv_rows(results, specs))
    return results


def run_compare(cfg, manifest_b=None, dilate=None, cases=None, cases_b=None):
    """Same pipeline on two mask sources (a second manifest, or source A dilated)."""
    cfg.validate()
    out = _out_dir(cfg)
    cases = _load(cfg) if cases is None else cases
    masks_a = {c.patient_id: (c.pancreas, c.vein) for c in cases}
    if cases_b is None and manifest_b is not None:
        cases_b = load_cases(load_manifest(manifest_b))
    if cases_b is not None:
        masks_b = {c.patient_id: (c.pancreas, c.vein) for c in cases_b}
    elif dilate:
        masks_b = {pid: (dilate_mask(p, dilate), dilate_mask(v, dilate)) for pid, (p, v) in masks_a.items()}
    else:
        raise PipelineError("config", "compare-masks needs a second manifest or --dilate")
    cmp = compare_mask_sources(cases, masks_a, masks_b, cfg.extraction, cfg.classifier_specs(),
                               cfg.seed, cfg.cv_folds)
    report = {"run_config": cfg.to_dict(), "source_b": manifest_b or f"dilate:{dilate}", **cmp.to_dict(),
              "notes": NOTES}
    dump_json(report, out / "compare.json")
    return cmp


def run_pca(cfg, components=2, cases=None):
    """Project standardised patient vectors; writes ``pca.csv``."""
    cfg.validate()
    out = _out_dir(cfg)
    cases = _load(cfg) if cases is None else cases
    ds, _, _ = build_dataset(cases, cfg.extraction)
    Z = fit_scaler(ds.X).transform(ds.X)
    res = pca_project(Z, components)
    with open(out / "pca.csv", "w", newline="") as fh:
        for i, v in enumerate(res.variance_explained, start=1):
            fh.write(f"# variance_explained_pc{i}={float(v)!r}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["patient_id", "label", *[f"pc{i}" for i in range(1, components + 1)]])
        for pid, label, row in zip(ds.ids, ds.y, res.projections):
            w.writerow([pid, _label_text(label), *map(_fmt, row)])
    return res


def read_pca_csv(path):
    """Inverse of :func:`run_pca`'s file: ``(variance_explained, ids, labels, projections)``."""
    ratios, ids, labels, rows = [], [], [], []
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = [ln for ln in lines if not ln.startswith("#")]
    for ln in lines:
        if ln.startswith("# variance_explained_pc"):
            ratios.append(float(ln.split("=", 1)[1]))
    for rec in csv.DictReader(body):
        ids.append(rec["patient_id"])
        labels.append(rec["label"])
        rows.append([float(v) for k, v in rec.items() if k.startswith("pc")])
    return np.array(ratios), ids, labels, np.array(rows)

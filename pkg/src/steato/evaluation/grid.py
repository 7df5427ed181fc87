import itertools
from dataclasses import dataclass, field

from ..cohort import build_dataset
from ..errors import SteatoError
from ..patches import ExtractionConfig
from .crossval import cross_validate, kmeans_unsupervised
from .metrics import METRIC_NAMES


@dataclass
class GridResult:
    config: ExtractionConfig
    metrics: dict = field(default_factory=dict)  # method -> MetricSet (mean over folds)
    std: dict = field(default_factory=dict)
    patients_evaluated: int = 0
    patients_skipped: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)  # method -> message

    def value(self, method, metric="accuracy"):
        m = self.metrics.get(method)
        return None if m is None else getattr(m, metric)

    def to_dict(self):
        return {
            "config": self.config.to_dict(),
            "methods": {
                k: {"mean": v.to_dict(), "std": self.std[k].to_dict() if k in self.std else None}
                for k, v in self.metrics.items()
            },
            "errors": dict(self.errors),
            "patients_evaluated": self.patients_evaluated,
            "skipped_patients": list(self.patients_skipped),
        }


def evaluate_methods(ds, methods, seed=0, cv_k=5):
    """K-Means: unsupervised fit on all patients; supervised methods: stratified CV.

    Returns ``(metrics, std, errors, details)`` keyed by method name.
    """
    metrics, std, errors, details = {}, {}, {}, {}
    for spec in methods:
        try:
            if spec.unsupervised:
                res = kmeans_unsupervised(ds, spec)
                metrics[spec.kind] = res.metrics
            else:
                res = cross_validate(ds, spec, cv_k, seed)
                metrics[spec.kind] = res.mean
                std[spec.kind] = res.std
            details[spec.kind] = res
        except (SteatoError, ValueError) as exc:
            errors[spec.kind] = f"{type(exc).__name__}: {exc}"
    return metrics, std, errors, details


def evaluate_config(cases, cfg, methods, seed=0, cv_k=5, threads=None):
    labeled = [c for c in cases if c.label is not None]
    ds, skipped, _ = build_dataset(labeled, cfg, threads)
    result = GridResult(cfg, patients_evaluated=len(ds), patients_skipped=[pid for pid, _ in skipped])
    if len(ds) == 0:
        result.errors = {spec.kind: "NoPatches: every patient was skipped" for spec in methods}
        return result
    result.metrics, result.std, result.errors, _ = evaluate_methods(ds, methods, seed, cv_k)
    return result


def grid_search(cases, s_grid, delta_grid, bins_grid, methods, seed=0, cv_k=5, threads=None, progress=None):
    """Re-run the whole chain for every (s, delta, B) in the Cartesian product.

    Invalid grid values raise before any work starts; a cell or method that fails
    at run time is recorded in its result instead of aborting the sweep.
    """
    if not (s_grid and delta_grid and bins_grid):
        raise ValueError("every grid axis needs at least one value")
    configs = [ExtractionConfig(s, d, b) for s, d, b in itertools.product(s_grid, delta_grid, bins_grid)]
    results = []
    for cfg in configs:
        results.append(evaluate_config(cases, cfg, methods, seed, cv_k, threads))
        if progress:
            progress(results[-1])
    return results


def rank(results, method, metric="accuracy"):
    """Cells that produced ``method``'s metric, best first; ties keep grid order."""
    scored = [r for r in results if method in r.metrics]
    return sorted(scored, key=lambda r: -getattr(r.metrics[method], metric))


GRID_CSV_HEADER = ["s", "delta", "bins", "method", *METRIC_NAMES,
                   "patients_evaluated", "patients_skipped", "error"]


def grid_csv_rows(results, methods):
    for r in results:
        for spec in methods:
            m = r.metrics.get(spec.kind)
            vals = [repr(float(getattr(m, k))) for k in METRIC_NAMES] if m else [""] * len(METRIC_NAMES)
            yield [r.config.patch_size, r.config.fat_depth, r.config.bins, spec.kind, *vals,
                   r.patients_evaluated, len(r.patients_skipped), r.errors.get(spec.kind, "")]

from dataclasses import dataclass, replace

import numpy as np
from scipy.ndimage import binary_dilation

from ..errors import MissingMask
from .grid import evaluate_config


@dataclass
class MaskComparison:
    config: object
    result_a: object
    result_b: object
    rows: list  # one dict per method

    def to_dict(self):
        return {
            "config": self.config.to_dict(),
            "rows": self.rows,
            "source_a": self.result_a.to_dict(),
            "source_b": self.result_b.to_dict(),
        }


def dilate_mask(mask, pixels=1):
    return binary_dilation(mask, structure=np.ones((3, 3), dtype=bool), iterations=pixels)


def compare_mask_sources(patients, masks_a, masks_b, cfg, methods, seed=0, cv_k=5, threads=None):
    """Run the same pipeline on two mask sources and tabulate accuracy/F1 side by side.

    ``masks_a``/``masks_b`` map patient id to ``(pancreas, vein)``; every patient
    must appear in both.
    """
    for case in patients:
        in_a, in_b = case.patient_id in masks_a, case.patient_id in masks_b
        if not in_a or not in_b:
            raise MissingMask(case.patient_id, "B" if in_a else "A")
    orphans = sorted(set(masks_a) ^ set(masks_b))
    if orphans:
        raise MissingMask(orphans[0], "B" if orphans[0] in masks_a else "A")

    def with_masks(source):
        return [replace(c, pancreas=source[c.patient_id][0], vein=source[c.patient_id][1]) for c in patients]

    res_a = evaluate_config(with_masks(masks_a), cfg, methods, seed, cv_k, threads)
    res_b = evaluate_config(with_masks(masks_b), cfg, methods, seed, cv_k, threads)
    rows = []
    for spec in methods:
        a, b = res_a.metrics.get(spec.kind), res_b.metrics.get(spec.kind)
        row = {"method": spec.kind}
        for tag, m in (("a", a), ("b", b)):
            row[f"accuracy_{tag}"] = None if m is None else float(m.accuracy)
            row[f"f1_{tag}"] = None if m is None else float(m.f1)
        row["delta_accuracy"] = None if a is None or b is None else float(b.accuracy - a.accuracy)
        row["delta_f1"] = None if a is None or b is None else float(b.f1 - a.f1)
        rows.append(row)
    return MaskComparison(cfg, res_a, res_b, rows)

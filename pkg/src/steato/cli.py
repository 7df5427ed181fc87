"""Command-line entry point: ``steato <subcommand> ...``."""

import argparse
import json
import sys
from pathlib import Path

from .config import build_run_config
from .errors import PipelineError, SteatoError

DEFAULT_S_GRID = (3, 5, 7, 10, 15)
DEFAULT_DELTA_GRID = (10, 15, 20, 30, 40, 50)
DEFAULT_BINS_GRID = (8, 16, 32)


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}") from None


def _run_flags(p):
    p.add_argument("--config", help="key = value config file; flags override its values")
    p.add_argument("--manifest", required=False, help="patient manifest CSV")
    p.add_argument("--out", help="output directory")
    p.add_argument("--patch-size", type=int, dest="patch_size")
    p.add_argument("--fat-depth", type=int, dest="fat_depth")
    p.add_argument("--bins", type=int)
    p.add_argument("--methods", help="comma list of kmeans,knn,logreg,svm-linear,svm-rbf")
    p.add_argument("--cv-folds", type=int, dest="cv_folds")
    p.add_argument("--seed", type=int)


def _config_from(args):
    keys = ("manifest", "out", "patch_size", "fat_depth", "bins", "methods", "cv_folds", "seed")
    overrides = {k: getattr(args, k, None) for k in keys}
    for k in ("patch_features", "patch_dump"):
        if getattr(args, k, False):
            overrides[k] = True
    cfg = build_run_config(args.config, **overrides)
    if not cfg.manifest:
        raise PipelineError("config", "--manifest is required (flag or config file)")
    if not cfg.out:
        raise PipelineError("config", "--out is required (flag or config file)")
    return cfg


def cmd_phantom(args):
    from dataclasses import replace

    from .phantom import Ellipse, PhantomSpec, generate_cohort

    base = PhantomSpec(speckle_scale=args.speckle, texture_grain=args.grain)
    if args.size != base.width:
        k = args.size / base.width
        p, v = base.pancreas, base.vein
        base = replace(base, width=args.size, height=args.size,
                       pancreas=Ellipse(p.cx * k, p.cy * k, p.ax * k, p.ay * k),
                       vein=Ellipse(v.cx * k, v.cy * k, v.ax * k, v.ay * k),
                       fat_thickness=base.fat_thickness * k)
    cohort = generate_cohort(args.n_normal, args.n_fatty, args.dmu_normal, args.dmu_fatty,
                             base_spec=base, seed=args.seed, out_dir=args.out)
    print(json.dumps({"manifest": str(Path(args.out) / "manifest.csv"), "cases": len(cohort.cases)}))


def cmd_rasterize(args):
    from .imgio import (Structure, load_annotations, load_gray_image, rasterize_annotations, resize,
                        save_gray_image, save_mask)

    polys = load_annotations(args.annotations)
    if args.image:
        img = load_gray_image(args.image)
        height, width = img.shape
    elif args.width and args.height:
        img, width, height = None, args.width, args.height
    else:
        raise PipelineError("config", "rasterize needs --image or both --width and --height")
    masks = rasterize_annotations(polys, width, height)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = args.stem or Path(args.annotations).stem
    written = {}
    for structure, name in ((Structure.PANCREAS, "pancreas"), (Structure.SPLENIC_VEIN, "vein")):
        m = masks[structure]
        if args.size:
            m = resize(m, args.size, args.size)
        path = out / f"{stem}_{name}.png"
        save_mask(m, path)
        written[name] = str(path)
    if img is not None and args.size:
        path = out / f"{stem}.png"
        save_gray_image(resize(img, args.size, args.size), path)
        written["image"] = str(path)
    print(json.dumps(written))


def cmd_classify(args):
    from .pipeline import run_pipeline

    report = run_pipeline(_config_from(args))
    summary = {}
    for name, entry in report["methods"].items():
        if "unsupervised" in entry:
            summary[name] = entry["unsupervised"]["metrics"]["accuracy"]
        elif "cross_validation" in entry:
            summary[name] = entry["cross_validation"]["mean"]["accuracy"]
    print(json.dumps({"report": str(Path(report["run_config"]["out"]) / "report.json"), "accuracy": summary}))


def cmd_gridsearch(args):
    from .pipeline import run_grid

    cfg = _config_from(args)

    def progress(r):
        if not args.quiet:
            c = r.config
            acc = {k: round(v.accuracy, 4) for k, v in r.metrics.items()}
            print(f"s={c.patch_size} delta={c.fat_depth} B={c.bins} n={r.patients_evaluated} {acc}",
                  file=sys.stderr)

    results = run_grid(cfg, args.s_grid, args.delta_grid, args.bins_grid, progress=progress)
    print(json.dumps({"cells": len(results), "csv": str(Path(cfg.out) / "grid.csv")}))


def cmd_compare(args):
    from .pipeline import run_compare

    cfg = _config_from(args)
    cmp = run_compare(cfg, manifest_b=args.manifest_b, dilate=args.dilate)
    print(json.dumps({"rows": cmp.rows}))


def cmd_pca(args):
    from .pipeline import run_pca

    cfg = _config_from(args)
    res = run_pca(cfg, args.components)
    print(json.dumps({"variance_explained": [float(v) for v in res.variance_explained]}))


def build_parser():
    parser = argparse.ArgumentParser(prog="steato", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phantom", help="generate a synthetic labelled cohort")
    p.add_argument("--out", required=True)
    p.add_argument("--n-normal", type=int, default=30, dest="n_normal")
    p.add_argument("--n-fatty", type=int, default=30, dest="n_fatty")
    p.add_argument("--dmu-normal", type=float, default=25.0, dest="dmu_normal")
    p.add_argument("--dmu-fatty", type=float, default=5.0, dest="dmu_fatty")
    p.add_argument("--speckle", type=float, default=0.2)
    p.add_argument("--grain", type=float, default=1.5)
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("rasterize", help="polygon annotations (JSON) to binary mask PNGs")
    p.add_argument("--annotations", required=True)
    p.add_argument("--image", help="image whose size the masks take")
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--size", type=int, help="also resize masks (and image) to SIZE x SIZE")
    p.add_argument("--stem", help="output file stem (default: annotation file stem)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rasterize)

    p = sub.add_parser("classify", help="full pipeline with cross-validation")
    _run_flags(p)
    p.add_argument("--patch-features", action="store_true", dest="patch_features",
                   help="also write per-patch descriptors")
    p.add_argument("--patch-dump", action="store_true", dest="patch_dump",
                   help="also write per-patient patch locations")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("gridsearch", help="sweep patch size, fat depth and histogram bins")
    _run_flags(p)
    p.add_argument("--s-grid", type=_int_list, default=DEFAULT_S_GRID, dest="s_grid")
    p.add_argument("--delta-grid", type=_int_list, default=DEFAULT_DELTA_GRID, dest="delta_grid")
    p.add_argument("--bins-grid", type=_int_list, default=DEFAULT_BINS_GRID, dest="bins_grid")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("compare-masks", help="same pipeline on two mask sources")
    _run_flags(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--manifest-b", dest="manifest_b", help="manifest with the second mask source")
    group.add_argument("--dilate", type=int, help="second source = source A dilated by N pixels")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("pca", help="principal-component projection of patient vectors")
    _run_flags(p)
    p.add_argument("--components", type=int, default=2)
    p.set_defaults(func=cmd_pca)
    return parser


def _error_payload(exc):
    if isinstance(exc, PipelineError):
        return exc.to_dict()
    return {"error": str(exc), "stage": None, "patient_id": getattr(exc, "patient_id", None),
            "path": getattr(exc, "filename", None), "type": type(exc).__name__}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (SteatoError, FileNotFoundError, ValueError, OSError) as exc:
        payload = _error_payload(exc)
        print(json.dumps(payload), file=sys.stderr)
        out = getattr(args, "out", None)
        if out:
            try:
                Path(out).mkdir(parents=True, exist_ok=True)
                (Path(out) / "error.json").write_text(json.dumps(payload, indent=2) + "\n")
            except OSError:
                pass
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Run configuration: defaults < key-value config file < command-line flags."""

from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

from .errors import InvalidConfig
from .learners import METHODS, ClassifierSpec
from .patches import ExtractionConfig


@dataclass(frozen=True)
class RunConfig:
    manifest: Optional[str] = None
    out: Optional[str] = None
    patch_size: int = 3
    fat_depth: int = 20
    bins: int = 32
    methods: tuple = METHODS
    cv_folds: int = 5
    seed: int = 0
    knn_k: int = 5
    svm_c: float = 1.0
    svm_gamma: Optional[float] = None
    svm_tol: float = 1e-3
    svm_max_passes: int = 10
    logreg_lambda: float = 1e-2
    logreg_lr: float = 0.1
    logreg_iters: int = 2000
    patch_features: bool = False
    patch_dump: bool = False

    @property
    def extraction(self):
        return ExtractionConfig(self.patch_size, self.fat_depth, self.bins)

    def classifier_specs(self):
        return [
            ClassifierSpec(
                kind=m, k=self.knn_k, lam=self.logreg_lambda, lr=self.logreg_lr, iters=self.logreg_iters,
                C=self.svm_c, gamma=self.svm_gamma, tol=self.svm_tol, max_passes=self.svm_max_passes,
                seed=self.seed,
            )
            for m in self.methods
        ]

    def validate(self):
        self.extraction  # raises on invalid extraction values
        if not self.methods:
            raise InvalidConfig("at least one method is required")
        if self.cv_folds < 1:
            raise InvalidConfig("cv_folds must be >= 1")
        try:
            self.classifier_specs()
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from None
        return self

    def to_dict(self):
        d = asdict(self)
        d["methods"] = list(self.methods)
        return d


_BOOL = {"1": True, "true": True, "yes": True, "on": True, "0": False, "false": False, "no": False, "off": False}


def parse_methods(text):
    methods = tuple(m.strip().lower() for m in text.split(",") if m.strip())
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise InvalidConfig(f"unknown method(s) {', '.join(bad)}; choose from {', '.join(METHODS)}")
    return methods


def _coerce(name, raw):
    kinds = {f.name: f.type for f in fields(RunConfig)}
    if name not in kinds:
        raise InvalidConfig(f"unknown config key {name!r}")
    if isinstance(raw, str):
        raw = raw.strip()
    try:
        if name == "methods":
            return parse_methods(raw) if isinstance(raw, str) else tuple(raw)
        if name in ("patch_features", "patch_dump"):
            return raw if isinstance(raw, bool) else _BOOL[raw.lower()]
        if name == "svm_gamma":
            return None if raw in (None, "", "auto") else float(raw)
        if name in ("manifest", "out"):
            return str(raw)
        default = RunConfig.__dataclass_fields__[name].default
        return type(default)(raw)
    except (KeyError, ValueError, TypeError):
        raise InvalidConfig(f"bad value {raw!r} for {name}") from None


def read_config_file(path):
    """``key = value`` lines (``:`` also accepted); ``#`` starts a comment."""
    values = {}
    with open(path) as fh:
        for no, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            sep = "=" if "=" in line else ":" if ":" in line else None
            if sep is None:
                raise InvalidConfig(f"{path}:{no}: expected 'key = value'")
            key, value = (part.strip() for part in line.split(sep, 1))
            key = key.replace("-", "_").lower()
            values[key] = _coerce(key, value)
    return values


def build_run_config(file_path=None, **overrides):
    """Merge defaults, file values and non-None overrides (flags win)."""
    cfg = RunConfig()
    if file_path:
        cfg = replace(cfg, **read_config_file(file_path))
    flags = {k: _coerce(k, v) for k, v in overrides.items() if v is not None}
    return replace(cfg, **flags).validate()

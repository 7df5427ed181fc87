"""Segmentation-mask-guided fatty pancreas classification from B-mode ultrasound texture."""

__version__ = "0.1.0"

from .patches import ExtractionConfig  # noqa: E402
from .learners import ClassifierSpec, METHODS  # noqa: E402

__all__ = ["__version__", "ExtractionConfig", "ClassifierSpec", "METHODS"]

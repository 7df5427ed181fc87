"""Synthetic speckle phantoms with known pancreas/vein geometry and fat contrast.

Intensity model: ``clamp(round(mu_region * n(x, y)))`` where ``n`` is log-normal
multiplicative noise with unit mean and standard deviation ``speckle_scale``,
spatially correlated by a Gaussian of width ``texture_grain`` pixels.
"""

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from .errors import InvalidSpec
from .imgio import Label, PatientRecord, save_gray_image, save_mask, write_manifest

VEIN_ECHO_RATIO = 0.25


@dataclass(frozen=True)
class Ellipse:
    cx: float
    cy: float
    ax: float  # horizontal semi-axis
    ay: float  # vertical semi-axis

    def mask(self, width, height):
        x = (np.arange(width) + 0.5 - self.cx) / self.ax
        y = (np.arange(height) + 0.5 - self.cy) / self.ay
        return (x[None, :] ** 2 + y[:, None] ** 2) <= 1.0

    def contains_points(self, px, py):
        return ((px - self.cx) / self.ax) ** 2 + ((py - self.cy) / self.ay) ** 2 < 1.0

    def boundary(self, n=720):
        t = np.linspace(0, 2 * np.pi, n, endpoint=False)
        return self.cx + self.ax * np.cos(t), self.cy + self.ay * np.sin(t)


@dataclass(frozen=True)
class PhantomSpec:
    width: int = 256
    height: int = 256
    pancreas: Ellipse = Ellipse(128, 96, 96, 48)
    vein: Ellipse = Ellipse(128, 129.6, 48, 8)
    mu_pancreas: float = 80.0
    mu_fat: float = 105.0
    mu_background: float = 60.0
    speckle_scale: float = 0.2
    texture_grain: float = 1.5
    fat_thickness: float = 40.0  # rows of fat tissue rendered below the vein

    def validate(self):
        if self.width < 8 or self.height < 8:
            raise InvalidSpec("phantom must be at least 8x8")
        for name in ("mu_pancreas", "mu_fat", "mu_background"):
            v = getattr(self, name)
            if not 0 <= v <= 255:
                raise InvalidSpec(f"{name}={v} outside [0, 255]")
        if self.speckle_scale < 0 or self.texture_grain < 0 or self.fat_thickness <= 0:
            raise InvalidSpec("speckle_scale, texture_grain must be >= 0 and fat_thickness > 0")
        for e in (self.pancreas, self.vein):
            if e.ax <= 0 or e.ay <= 0:
                raise InvalidSpec("ellipse semi-axes must be positive")
        bx, by = self.vein.boundary()
        if not np.all(self.pancreas.contains_points(bx, by)):
            raise InvalidSpec("vein ellipse must lie strictly inside the pancreas ellipse")
        px, py = self.pancreas.boundary()
        if px.min() < 0 or py.min() < 0 or px.max() > self.width or py.max() > self.height:
            raise InvalidSpec("pancreas ellipse leaves the image")
        if self.fat_mask(self.pancreas_mask()).sum() == 0:
            raise InvalidSpec("geometry leaves no fat tissue below the vein")

    @property
    def delta_mu(self):
        return abs(self.mu_fat - self.mu_pancreas)

    def pancreas_mask(self):
        return self.pancreas.mask(self.width, self.height) | self.vein_mask()

    def vein_mask(self):
        return self.vein.mask(self.width, self.height)

    def fat_mask(self, pancreas_mask):
        xs = np.arange(self.width) + 0.5
        ys = np.arange(self.height) + 0.5
        cols = np.abs(xs - self.vein.cx) <= 1.1 * self.vein.ax
        rows = (ys > self.vein.cy) & (ys <= self.vein.cy + self.vein.ay + self.fat_thickness)
        return rows[:, None] & cols[None, :] & ~pancreas_mask


@dataclass
class PhantomCase:
    image: np.ndarray
    pancreas_mask: np.ndarray
    vein_mask: np.ndarray
    label: Label
    configured_delta_mu: float
    spec: PhantomSpec


def speckle_field(shape, speckle_scale, grain, rng):
    """Positive, unit-mean multiplicative noise with std ``speckle_scale``."""
    if speckle_scale == 0:
        return np.ones(shape)
    g = rng.standard_normal(shape)
    if grain > 0:
        g = gaussian_filter(g, sigma=grain, mode="reflect")
    g = (g - g.mean()) / g.std()
    s2 = np.log1p(speckle_scale ** 2)
    return np.exp(np.sqrt(s2) * g - 0.5 * s2)


def render(spec, rng):
    spec.validate()
    vein = spec.vein_mask()
    pancreas = spec.pancreas_mask()
    fat = spec.fat_mask(pancreas)
    mu = np.full((spec.height, spec.width), float(spec.mu_background))
    mu[fat] = spec.mu_fat
    mu[pancreas] = spec.mu_pancreas
    mu[vein] = VEIN_ECHO_RATIO * spec.mu_pancreas
    noise = speckle_field(mu.shape, spec.speckle_scale, spec.texture_grain, rng)
    image = np.clip(np.floor(mu * noise + 0.5), 0, 255).astype(np.uint8)
    return image, pancreas, vein


def generate_phantom(spec, seed, fatty_threshold=15.0):
    """Render one case, labelled Fatty iff its fat/pancreas contrast is <= ``fatty_threshold``."""
    image, pancreas, vein = render(spec, np.random.default_rng(seed))
    label = Label.FATTY if spec.delta_mu <= fatty_threshold else Label.NORMAL
    return PhantomCase(image, pancreas, vein, label, spec.delta_mu, spec)


def jitter_spec(base, rng):
    """Per-case geometry: centre +-5 % of the frame, semi-axes +-10 %; the vein keeps
    its position relative to the pancreas.
    """
    dx = rng.uniform(-0.05, 0.05) * base.width
    dy = rng.uniform(-0.05, 0.05) * base.height
    fpx, fpy = rng.uniform(0.9, 1.1, size=2)
    fvx, fvy = rng.uniform(0.9, 1.1, size=2)
    p, v = base.pancreas, base.vein
    pancreas = Ellipse(p.cx + dx, p.cy + dy, p.ax * fpx, p.ay * fpy)
    vein = Ellipse(
        pancreas.cx + (v.cx - p.cx) * fpx,
        pancreas.cy + (v.cy - p.cy) * fpy,
        v.ax * fvx,
        v.ay * fvy,
    )
    return replace(base, pancreas=pancreas, vein=vein)


@dataclass
class Cohort:
    cases: list
    records: list
    ids: list


def generate_cohort(n_normal, n_fatty, dmu_normal, dmu_fatty, base_spec=None, seed=0, out_dir=None,
                    mu_jitter=5.0):
    """Build ``n_normal + n_fatty`` labelled cases.

    Normal cases get ``mu_fat = mu_pancreas + dmu_normal``, fatty ones
    ``mu_pancreas + dmu_fatty``. Equal contrasts are accepted and give a null cohort
    whose labels carry no signal. Files are written only when ``out_dir`` is given.
    """
    if n_normal < 1 or n_fatty < 1:
        raise InvalidSpec("cohort needs at least one case per label")
    if dmu_fatty < 0 or dmu_normal < dmu_fatty:
        raise InvalidSpec("need dmu_normal >= dmu_fatty >= 0")
    base = base_spec or PhantomSpec()
    plan = [(Label.NORMAL, dmu_normal)] * n_normal + [(Label.FATTY, dmu_fatty)] * n_fatty
    children = np.random.SeedSequence(seed).spawn(len(plan))
    width = len(str(len(plan) - 1))

    if out_dir is not None:
        out_dir = Path(out_dir)
        (out_dir / "images").mkdir(parents=True, exist_ok=True)
        (out_dir / "masks").mkdir(parents=True, exist_ok=True)

    cases, records, ids = [], [], []
    for idx, ((label, dmu), child) in enumerate(zip(plan, children)):
        rng = np.random.default_rng(child)
        spec = jitter_spec(base, rng)
        mu_p = base.mu_pancreas + rng.uniform(-mu_jitter, mu_jitter)
        mu_bg = base.mu_background + rng.uniform(-mu_jitter, mu_jitter)
        spec = replace(spec, mu_pancreas=mu_p, mu_fat=mu_p + dmu, mu_background=mu_bg)
        image, pancreas, vein = render(spec, rng)
        pid = f"phantom_{idx:0{width}d}"
        case = PhantomCase(image, pancreas, vein, label, float(dmu), spec)
        cases.append(case)
        ids.append(pid)
        rec = PatientRecord(pid, f"images/{pid}.png", f"masks/{pid}_pancreas.png", f"masks/{pid}_vein.png", label)
        if out_dir is not None:
            save_gray_image(image, out_dir / rec.image_path)
            save_mask(pancreas, out_dir / rec.pancreas_mask_path)
            save_mask(vein, out_dir / rec.vein_mask_path)
            rec = replace(rec, image_path=str(out_dir / rec.image_path),
                          pancreas_mask_path=str(out_dir / rec.pancreas_mask_path),
                          vein_mask_path=str(out_dir / rec.vein_mask_path))
        records.append(rec)
    if out_dir is not None:
        write_manifest(records, out_dir / "manifest.csv")
    return Cohort(cases, records, ids)

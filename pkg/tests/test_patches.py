import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steato.errors import DimensionMismatch, EmptyVeinMask, InvalidBinCount, InvalidConfig
from steato.patches import (
    ExtractionConfig,
    Region,
    fat_patches,
    fat_region,
    pancreas_patches,
    patch_dump,
)

from oracles import fat_region_loops


def _cfg(s):
    return ExtractionConfig(patch_size=s, fat_depth=20, bins=32)


def _origins(patches):
    return [p.origin for p in patches]


class TestExtractionConfig:
    def test_defaults(self):
        assert ExtractionConfig().to_dict() == {"s": 3, "delta": 20, "bins": 32}

    @pytest.mark.parametrize("bins", [0, 3, 7, 100, 512])
    def test_bad_bins(self, bins):
        with pytest.raises(InvalidBinCount):
            ExtractionConfig(bins=bins)

    @pytest.mark.parametrize("kw", [{"patch_size": 0}, {"fat_depth": 0}, {"patch_size": 2.5}])
    def test_bad_sizes(self, kw):
        with pytest.raises(InvalidConfig):
            ExtractionConfig(**kw)


class TestPancreasPatches:
    def test_full_frame_tiling(self):
        img = np.arange(81, dtype=np.uint8).reshape(9, 9)
        pan = np.ones((9, 9), bool)
        out = pancreas_patches(img, pan, np.zeros_like(pan), _cfg(3))
        assert _origins(out) == [(x, y) for y in (0, 3, 6) for x in (0, 3, 6)]
        assert all(p.region is Region.PANCREAS and p.size == 3 for p in out)
        assert np.array_equal(out[4].pixels, img[3:6, 3:6])

    def test_vein_block_excluded(self):
        pan = np.ones((9, 9), bool)
        vein = np.zeros_like(pan)
        vein[3:6, 3:6] = True
        out = pancreas_patches(np.zeros((9, 9), np.uint8), pan, vein, _cfg(3))
        assert len(out) == 8
        assert (3, 3) not in _origins(out)

    def test_empty_mask(self):
        z = np.zeros((9, 9), bool)
        assert pancreas_patches(np.zeros((9, 9), np.uint8), z, z, _cfg(3)) == []

    def test_anchor_follows_bounding_box(self):
        pan = np.zeros((12, 12), bool)
        pan[1:7, 2:8] = True
        out = pancreas_patches(np.zeros((12, 12), np.uint8), pan, np.zeros_like(pan), _cfg(3))
        assert _origins(out) == [(2, 1), (5, 1), (2, 4), (5, 4)]

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            pancreas_patches(np.zeros((4, 4), np.uint8), np.ones((4, 5), bool), np.zeros((4, 4), bool), _cfg(3))


class TestFatRegion:
    def test_single_column(self):
        vein = np.zeros((30, 10), bool)
        vein[10:13, 5] = True
        out = fat_region(vein, 3)
        assert sorted(zip(*np.nonzero(out))) == [(13, 5), (14, 5), (15, 5)]

    def test_bottom_row_clipped(self):
        vein = np.zeros((8, 4), bool)
        vein[7, 2] = True
        assert not fat_region(vein, 5).any()

    def test_two_columns(self):
        vein = np.zeros((30, 4), bool)
        vein[10, 0] = True
        vein[20, 1] = True
        out = fat_region(vein, 2)
        assert sorted(zip(*np.nonzero(out))) == [(11, 0), (12, 0), (21, 1), (22, 1)]

    def test_holes_use_lowest_pixel(self):
        vein = np.zeros((20, 1), bool)
        vein[[2, 3, 9], 0] = True
        assert np.flatnonzero(fat_region(vein, 2)[:, 0]).tolist() == [10, 11]

    def test_empty(self):
        with pytest.raises(EmptyVeinMask):
            fat_region(np.zeros((5, 5), bool), 3)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 60), st.integers(1, 60), st.integers(1, 70))
    def test_matches_loops(self, seed, h, w, delta):
        rng = np.random.default_rng(seed)
        vein = rng.random((h, w)) < rng.uniform(0.01, 0.3)
        vein[rng.integers(h), rng.integers(w)] = True
        assert np.array_equal(fat_region(vein, delta), fat_region_loops(vein, delta))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 30), st.integers(0, 30))
    def test_monotone_in_depth(self, seed, d1, extra):
        rng = np.random.default_rng(seed)
        vein = rng.random((40, 30)) < 0.05
        vein[0, 0] = True
        small, big = fat_region(vein, d1), fat_region(vein, d1 + extra)
        assert not (small & ~big).any()


class TestFatPatches:
    def test_clear_block(self):
        region = np.zeros((20, 20), bool)
        region[10:16, 4:10] = True
        z = np.zeros_like(region)
        out = fat_patches(np.zeros((20, 20), np.uint8), region, z, z, _cfg(3))
        assert _origins(out) == [(4, 10), (7, 10), (4, 13), (7, 13)]
        assert all(p.region is Region.FAT for p in out)

    def test_region_inside_pancreas(self):
        region = np.zeros((20, 20), bool)
        region[2:10, 2:10] = True
        z = np.zeros_like(region)
        assert fat_patches(np.zeros((20, 20), np.uint8), region, region.copy(), z, _cfg(3)) == []

    def test_band_below_straight_vein(self):
        vein = np.zeros((140, 30), bool)
        vein[95:101, 0:30] = True
        region = fat_region(vein, 20)
        z = np.zeros_like(vein)
        out = fat_patches(np.zeros(vein.shape, np.uint8), region, z, vein, _cfg(3))
        assert len(out) == 60
        assert {y for _, y in _origins(out)} == {101, 104, 107, 110, 113, 116}


def _random_scene(seed, h=48, w=48):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[:h, :w]
    cx, cy = rng.uniform(12, 36, 2)
    pan = ((xx - cx) / rng.uniform(6, 20)) ** 2 + ((yy - cy) / rng.uniform(5, 14)) ** 2 <= 1
    vein = pan & (((xx - cx) / 5.0) ** 2 + ((yy - cy - 2) / 2.0) ** 2 <= 1)
    if not vein.any():
        vein[int(cy), int(cx)] = True
        pan[int(cy), int(cx)] = True
    img = rng.integers(0, 256, (h, w), dtype=np.uint8)
    return img, pan, vein


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([1, 2, 3, 5, 7]), st.integers(1, 30))
def test_disjoint_and_contained(seed, s, delta):
    img, pan, vein = _random_scene(seed)
    cfg = ExtractionConfig(patch_size=s, fat_depth=delta, bins=8)
    region = fat_region(vein, delta)
    for patches, ok in ((pancreas_patches(img, pan, vein, cfg), pan & ~vein),
                        (fat_patches(img, region, pan, vein, cfg), region & ~pan & ~vein)):
        cover = np.zeros(pan.shape, int)
        for p in patches:
            cover[p.y:p.y + s, p.x:p.x + s] += 1
            assert np.array_equal(p.pixels, img[p.y:p.y + s, p.x:p.x + s])
        assert cover.max(initial=0) <= 1
        assert not (cover.astype(bool) & ~ok).any()
        keys = [(p.y, p.x) for p in patches]
        assert keys == sorted(keys)


def test_deterministic():
    img, pan, vein = _random_scene(3)
    a = pancreas_patches(img, pan, vein, _cfg(2))
    b = pancreas_patches(img, pan, vein, _cfg(2))
    assert _origins(a) == _origins(b)


def test_patch_dump_layout():
    d = patch_dump("p1", _cfg(5), np.array([[1, 2]]), np.empty((0, 2)))
    assert d == {"patient_id": "p1", "config": {"s": 5, "delta": 20, "bins": 32},
                 "pancreas_patches": [{"x": 1, "y": 2}], "fat_patches": []}

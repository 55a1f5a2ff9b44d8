import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aerotarget.classify import ClassDistribution
from aerotarget.fpr import (
    FprConfig,
    count_regions,
    filter_by_presence,
    filter_by_structure,
    passes_probability_gate,
    touches_border,
)
from aerotarget.segmentation import Segment
from oracles import flood_fill_components


def seg(mask):
    mask = np.asarray(mask, dtype=bool)
    return Segment(mask, (0.0, 0.5, 0.5), int(mask.sum()))


def blob(shape, rng, inset=2):
    """Solid random rectangle-or-disc kept away from the border."""
    h, w = shape
    m = np.zeros(shape, bool)
    y0, x0 = rng.integers(inset, h // 2), rng.integers(inset, w // 2)
    y1, x1 = rng.integers(y0 + 8, h - inset), rng.integers(x0 + 8, w - inset)
    if rng.random() < 0.5:
        m[y0:y1, x0:x1] = True
    else:
        yy, xx = np.mgrid[0:h, 0:w]
        cy, cx, r = (y0 + y1) / 2, (x0 + x1) / 2, min(y1 - y0, x1 - x0) / 2
        m[(yy - cy) ** 2 + (xx - cx) ** 2 <= r * r] = True
    return m


class TestCountRegions:
    def test_matches_flood_fill_on_1000_masks(self):
        rng = np.random.default_rng(0)
        for i in range(1000):
            mask = rng.random((32, 32)) < rng.uniform(0.05, 0.7)
            assert count_regions(mask) == len(flood_fill_components(mask)), i

    def test_diagonal_is_one_region(self):
        assert count_regions(np.eye(6, dtype=bool)) == 1

    def test_empty(self):
        assert count_regions(np.zeros((4, 4), bool)) == 0

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_count_is_translation_invariant(self, seed):
        mask = np.random.default_rng(seed).random((12, 12)) < 0.4
        big = np.zeros((20, 20), bool)
        big[5:17, 3:15] = mask
        assert count_regions(big) == count_regions(mask)


class TestStructureFilter:
    cfg = FprConfig()
    plain = FprConfig(discard_border_segments=False)

    def test_salt_and_pepper_rejected(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            m = np.zeros((48, 48), bool)
            # isolated pixels on a sparse lattice cannot touch each other
            ys, xs = np.mgrid[2:46:3, 2:46:3]
            pick = rng.random(ys.shape) < 0.3
            m[ys[pick], xs[pick]] = True
            if count_regions(m) < 10:
                continue
            assert filter_by_structure([seg(m)], self.plain, m.size) == []

    def test_single_and_two_region_masks_kept(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            one = blob((48, 48), rng)
            assert filter_by_structure([seg(one)], self.cfg, one.size)
            two = np.zeros((48, 96), bool)
            two[:, :48] = blob((48, 48), rng)
            two[:, 48:] = blob((48, 48), rng)
            assert count_regions(two) == 2
            assert filter_by_structure([seg(two)], self.cfg, two.size)

    def test_three_regions_rejected_at_max_two(self):
        m = np.zeros((10, 20), bool)
        m[2:4, 2:4] = m[2:4, 8:10] = m[2:4, 14:16] = True
        assert filter_by_structure([seg(m)], self.cfg, 1000) == []
        assert filter_by_structure([seg(m)], FprConfig(max_regions=3), 1000)

    def test_fill_threshold(self):
        m = np.zeros((20, 20), bool)
        m[5:7, 5:7] = True
        assert filter_by_presence([seg(m)], FprConfig(min_mask_fill=0.01), 400)
        assert filter_by_presence([seg(m)], FprConfig(min_mask_fill=0.011), 400) == []

    def test_border_rule(self):
        m = np.zeros((10, 10), bool)
        m[0:3, 3:6] = True
        assert touches_border(m)
        assert filter_by_presence([seg(m)], self.cfg, 100) == []
        assert filter_by_presence([seg(m)], self.plain, 100)

    def test_order_preserved(self):
        rng = np.random.default_rng(3)
        masks = [blob((30, 30), rng) for _ in range(5)]
        segs = [seg(m) for m in masks]
        assert filter_by_structure(segs, self.cfg, 900) == segs

    def test_bad_area(self):
        with pytest.raises(ValueError):
            filter_by_presence([], self.cfg, 0)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            FprConfig(max_regions=0)
        with pytest.raises(ValueError):
            FprConfig(min_top_probability=1.0)


class TestProbabilityGate:
    cfg = FprConfig(min_top_probability=0.35)

    def test_bound_is_inclusive(self):
        assert passes_probability_gate(np.array([0.35, 0.33, 0.32]), self.cfg)
        assert not passes_probability_gate(np.array([0.34, 0.33, 0.33]), self.cfg)

    def test_uniform_rejected(self):
        assert not passes_probability_gate(np.full(36, 1 / 36), self.cfg)

    def test_accepts_distribution_objects(self):
        d = ClassDistribution(("a", "b"), np.array([0.9, 0.1]))
        assert passes_probability_gate(d, self.cfg)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=10), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
    def test_monotone_in_threshold(self, raw, t1, t2):
        p = np.array(raw) / np.sum(raw)
        lo, hi = sorted([t1, t2])
        if passes_probability_gate(p, FprConfig(min_top_probability=hi)):
            assert passes_probability_gate(p, FprConfig(min_top_probability=lo))

    def test_invalid_distribution(self):
        with pytest.raises(ValueError):
            passes_probability_gate(np.array([0.5, 0.6]), self.cfg)
        with pytest.raises(ValueError):
            passes_probability_gate(np.array([]), self.cfg)

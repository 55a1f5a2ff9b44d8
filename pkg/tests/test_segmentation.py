import colorsys
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aerotarget.imgcore import rgb_to_hls
from aerotarget.numerics import PCA, MinMaxScaler
from aerotarget.segmentation import (
    MaskSegmenter,
    Segment,
    SegmentationConfig,
    dump_segments,
    features_to_hls,
    hls_features,
    reconstruct_center,
    segment,
)

STRIPE_COLORS = [(255, 0, 0), (0, 0, 255), (0, 128, 0), (255, 255, 0), (255, 255, 255)]


def stripes(colors=STRIPE_COLORS, width=8, height=30):
    img = np.zeros((height, width * len(colors), 3), dtype=np.uint8)
    truth = []
    for i, c in enumerate(colors):
        img[:, i * width : (i + 1) * width] = c
        m = np.zeros(img.shape[:2], bool)
        m[:, i * width : (i + 1) * width] = True
        truth.append((c, m))
    return img, truth


def hue_gap(a, b):
    d = abs(a - b) % 360
    return min(d, 360 - d)


def check_centers(segs, truth):
    for seg in segs:
        color, _ = next((c, m) for c, m in truth if np.array_equal(m, seg.mask))
        h, l, s = colorsys.rgb_to_hls(*(v / 255 for v in color))
        assert abs(seg.center_hls[1] - l) <= 0.02
        assert abs(seg.center_hls[2] - s) <= 0.02
        if s > 0:
            assert hue_gap(seg.center_hls[0], h * 360) <= 2


class TestStripes:
    @pytest.mark.parametrize(
        "cfg, centers",
        [
            (SegmentationConfig(), True),
            # 95% variance drops a component, so centers are projections
            (SegmentationConfig(hue_encoding="linear", variance_target=0.95, denoise=False, merge_distance=None), False),
        ],
        ids=["default", "plain"],
    )
    def test_five_stripes_exact(self, cfg, centers):
        img, truth = stripes()
        segs = segment(img, cfg)
        assert len(segs) == 5
        got = sorted(tuple(np.flatnonzero(s.mask.any(axis=0))) for s in segs)
        want = sorted(tuple(np.flatnonzero(m.any(axis=0))) for _, m in truth)
        assert got == want
        for s in segs:
            assert any(np.array_equal(s.mask, m) for _, m in truth)
        if centers:
            check_centers(segs, truth)

    def test_red_across_hue_wrap(self):
        colors = [(255, 0, 8), (255, 8, 0), (0, 0, 255), (0, 128, 0), (0, 0, 0)]
        img, truth = stripes(colors)
        segs = segment(img, SegmentationConfig(merge_distance=None))
        assert len(segs) == 5
        check_centers(segs, truth)


class TestPartition:
    @settings(max_examples=100, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), h=st.integers(8, 40), w=st.integers(8, 40))
    def test_masks_partition_random_crops(self, seed, h, w):
        rng = np.random.default_rng(seed)
        n_colors = int(rng.integers(1, 9))
        palette = rng.integers(0, 256, size=(n_colors, 3))
        img = palette[rng.integers(0, n_colors, size=(h, w))].astype(np.uint8)
        img = np.clip(img + rng.normal(0, 5, img.shape), 0, 255).astype(np.uint8)
        model = MaskSegmenter().fit(img)
        total = np.zeros((h, w), dtype=int)
        for s in model.segments_:
            total += s.mask
            assert s.population == s.mask.sum() > 0
        assert np.all(total == 1)
        assert 1 <= len(model.segments_) <= 5
        for j, s in enumerate(model.segments_):
            assert np.array_equal(model.labels_ == j, s.mask)
        assert model.pca_.explained_variance_ratio_.sum() >= 0.95 - 1e-12

    def test_constant_crop_is_one_segment(self):
        img = np.full((12, 12, 3), (10, 200, 30), dtype=np.uint8)
        segs = segment(img)
        assert len(segs) == 1 and segs[0].mask.all()
        r, g, b = colorsys.hls_to_rgb(segs[0].center_hls[0] / 360, *segs[0].center_hls[1:])
        assert np.allclose(np.array([r, g, b]) * 255, (10, 200, 30), atol=1.0)

    def test_fixed_seed_is_deterministic(self):
        img = np.random.default_rng(0).integers(0, 256, (20, 20, 3), dtype=np.uint8)
        a = MaskSegmenter(seed=4).fit(img).labels_
        b = MaskSegmenter(seed=4).fit(img).labels_
        np.testing.assert_array_equal(a, b)

    def test_tiny_crop_rejected(self):
        with pytest.raises(ValueError):
            segment(np.zeros((4, 4, 3), np.uint8))


class TestFeatures:
    @settings(max_examples=200, deadline=None)
    @given(
        h=st.floats(0, 359.9),
        l=st.floats(0.02, 0.98),
        s=st.floats(0.02, 1.0),
        enc=st.sampled_from(["linear", "cone"]),
    )
    def test_features_round_trip(self, h, l, s, enc):
        back = features_to_hls(hls_features(np.array([[h, l, s]]), enc), enc)[0]
        assert hue_gap(back[0], h) < 1e-6
        assert np.allclose(back[1:], [l, s], atol=1e-9)

    def test_unknown_encoding(self):
        with pytest.raises(ValueError):
            hls_features(np.zeros((1, 3)), "polar")

    def test_median_center_ignores_outliers(self):
        # 9 pixels of one color and 2 far outliers: the median stays on the color
        rgb = np.array([[200, 40, 40]] * 9 + [[0, 0, 255], [255, 255, 255]], dtype=np.uint8)
        feats = hls_features(rgb_to_hls(rgb))
        pca = PCA(1.0).fit(feats)
        scaler = MinMaxScaler().fit(pca.transform(feats))
        center = reconstruct_center(pca, scaler, scaler.transform(pca.transform(feats)))
        want = rgb_to_hls(np.array([200, 40, 40], dtype=np.uint8))
        assert np.allclose(center, want, atol=1e-9)

    def test_reconstruct_empty_raises(self):
        feats = np.random.default_rng(0).random((10, 3))
        pca = PCA().fit(feats)
        scaler = MinMaxScaler().fit(pca.transform(feats))
        with pytest.raises(ValueError):
            reconstruct_center(pca, scaler, np.empty((0, pca.n_components_)))


class TestApi:
    def test_config_validation(self):
        for bad in [dict(k=1), dict(variance_target=0), dict(hue_encoding="x"), dict(merge_distance=-1)]:
            with pytest.raises(ValueError):
                SegmentationConfig(**bad)

    def test_estimator_params_round_trip(self):
        m = MaskSegmenter.from_config(SegmentationConfig(k=4, seed=9))
        assert m.get_params()["k"] == 4 and m.get_params()["seed"] == 9
        with pytest.raises(ValueError):
            MaskSegmenter(k=0).fit(np.zeros((10, 10, 3), np.uint8))

    def test_segment_population_checked(self):
        with pytest.raises(ValueError):
            Segment(np.ones((2, 2), bool), (0.0, 0.5, 0.5), 3)

    def test_dump_segments(self, tmp_path):
        img, _ = stripes()
        segs = segment(img)
        dump_segments(segs, tmp_path, "crop")
        meta = json.loads((tmp_path / "crop_segments.json").read_text())
        assert len(meta) == 5
        assert all((tmp_path / m["mask"]).is_file() for m in meta)

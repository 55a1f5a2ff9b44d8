"""End-to-end target detector: proposals, segmentation, gating, classification."""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .classify import classify_target
from .config import PipelineConfig
from .imgcore import write_image
from .models import load_assets
from .roi import propose_regions
from .segmentation import MaskSegmenter, dump_segments
from .validation import check_image

OVERLAY_COLOR = (255, 0, 255)


def draw_boxes(img: np.ndarray, boxes, color=OVERLAY_COLOR) -> np.ndarray:
    """Copy of ``img`` with one-pixel box outlines."""
    out = img.copy()
    for b in boxes:
        x1, y1 = b.x_max - 1, b.y_max - 1
        out[b.y_min, b.x_min : b.x_max] = color
        out[y1, b.x_min : b.x_max] = color
        out[b.y_min : b.y_max, b.x_min] = color
        out[b.y_min : b.y_max, x1] = color
    return out


class TargetDetector(BaseEstimator):
    """Detect and classify targets in RGB frames.

    Parameters
    ----------
    config : PipelineConfig, optional
        Stage settings; defaults to ``PipelineConfig()``.
    assets : str or path, optional
        Classifier asset file. Falls back to ``config.classify.assets`` and
        then to the bundled default.
    seed : int, optional
        Overrides ``config.seed``. The same seed drives the color
        quantisation and the segmentation k-means.
    """

    def __init__(self, config=None, assets=None, seed=None):
        self.config = config
        self.assets = assets
        self.seed = seed

    def _config(self) -> PipelineConfig:
        cfg = self.config if self.config is not None else PipelineConfig()
        if not isinstance(cfg, PipelineConfig):
            raise TypeError("config must be a PipelineConfig")
        return cfg

    def fit(self, X=None, y=None):
        """Load the classifier pair; ``X`` and ``y`` are ignored."""
        cfg = self._config()
        loaded = load_assets(self.assets or cfg.classify.assets)
        self.char_model_ = loaded.char_model
        self.shape_model_ = loaded.shape_model
        self.seed_ = int(self.seed if self.seed is not None else cfg.seed)
        self.segmenter_ = MaskSegmenter.from_config(replace(cfg.segmentation, seed=self.seed_))
        return self

    def detect(self, image, debug_dir=None) -> list:
        """Target reports for one frame, optionally dumping intermediates."""
        check_is_fitted(self, "char_model_")
        cfg = self._config()
        frame = check_image(image, name="frame")
        if min(frame.shape[:2]) < 32:
            return []
        proposals, trace = propose_regions(frame, cfg.roi, seed=self.seed_, trace=True)
        reports = []
        debug = Path(debug_dir) if debug_dir is not None else None
        if debug is not None:
            debug.mkdir(parents=True, exist_ok=True)
            write_image(debug / "quantized.png", trace.quantized)
            write_image(debug / "edges.png", trace.edges)
        for i, prop in enumerate(proposals):
            segments = self.segmenter_.fit(prop.crop).segments_
            if debug is not None:
                write_image(debug / f"roi{i}.png", prop.crop)
                dump_segments(segments, debug, f"roi{i}")
            report = classify_target(
                prop.box,
                segments,
                self.char_model_,
                self.shape_model_,
                cfg.fpr,
                cfg.classify.shape_selection,
            )
            if report is not None:
                reports.append(report)
        if debug is not None:
            overlay = draw_boxes(frame, [p.box for p in proposals], (255, 255, 0))
            write_image(debug / "overlay.png", draw_boxes(overlay, [r.box for r in reports]))
        return reports

    def predict(self, X) -> list:
        """Report lists for a single frame or a sequence of frames."""
        if isinstance(X, np.ndarray) and X.ndim == 3:
            return self.detect(X)
        return [self.detect(img) for img in X]

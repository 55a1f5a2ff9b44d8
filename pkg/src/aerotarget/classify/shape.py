"""Contour-feature nearest-centroid shape classifier."""

from __future__ import annotations

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull
from skimage import measure
from sklearn.utils.validation import check_is_fitted

from ..synthgen.shapes import render_mask
from ..taxonomy import SHAPES
from .base import MaskClassifier, check_masks, softmax

FEATURE_NAMES = ("circularity", "solidity", "vertices", "extent", "aspect")
VERTEX_TOLERANCE = 0.02  # polygon approximation tolerance, fraction of perimeter


def largest_component(mask: np.ndarray) -> np.ndarray:
    labels, n = ndimage.label(mask, structure=np.ones((3, 3), dtype=bool))
    if n <= 1:
        return mask
    sizes = np.bincount(labels.ravel())[1:]
    return labels == (int(np.argmax(sizes)) + 1)


def _outer_contour(mask: np.ndarray) -> np.ndarray:
    contours = measure.find_contours(np.pad(mask, 1).astype(np.float64), 0.5)
    return max(contours, key=len) - 1.0


def min_area_rectangle(points: np.ndarray) -> tuple[float, float]:
    """Side lengths (short, long) of the smallest enclosing rotated rectangle."""
    try:
        hull = points[ConvexHull(points).vertices]
    except Exception:  # degenerate (collinear) point sets
        hull = points
    edges = np.diff(np.vstack([hull, hull[:1]]), axis=0)
    angles = np.unique(np.mod(np.arctan2(edges[:, 1], edges[:, 0]), np.pi / 2))
    best = None
    for a in angles:
        c, s = np.cos(a), np.sin(a)
        u = hull[:, 0] * c + hull[:, 1] * s
        v = -hull[:, 0] * s + hull[:, 1] * c
        w, h = np.ptp(u), np.ptp(v)
        if best is None or w * h < best[0] * best[1]:
            best = (w, h)
    w, h = best
    return float(min(w, h)), float(max(w, h))


def shape_features(mask) -> np.ndarray:
    """Circularity, solidity, vertex count, rotated-box fill and aspect ratio
    of the silhouette of the largest 8-connected component of ``mask``."""
    (mask,) = check_masks([mask])
    # the outer contour defines the silhouette, so interior holes do not count
    comp = ndimage.binary_fill_holes(largest_component(mask))
    props = measure.regionprops(comp.astype(np.uint8))[0]
    area = float(props.area)
    perimeter = max(float(props.perimeter_crofton), 1e-9)
    circularity = 4.0 * np.pi * area / perimeter**2
    solidity = float(props.solidity)
    contour = _outer_contour(comp)
    length = float(np.sum(np.hypot(*np.diff(contour, axis=0).T)))
    poly = measure.approximate_polygon(contour, tolerance=VERTEX_TOLERANCE * length)
    vertices = max(len(poly) - 1, 1)
    # pixel squares enclose the contour, which runs through pixel centres
    short, long_ = min_area_rectangle(contour)
    extent = area / ((short + 1.0) * (long_ + 1.0))
    aspect = (short + 1.0) / (long_ + 1.0)
    return np.array([circularity, solidity, float(vertices), extent, aspect])


class CentroidShapeClassifier(MaskClassifier):
    """Nearest-centroid classifier over standardized contour features.

    The distribution is a softmax over negative distances to the class
    centroids at ``temperature``.
    """

    def __init__(self, temperature: float = 0.1):
        self.temperature = temperature

    def fit(self, X, y):
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        feats = np.stack([shape_features(m) for m in check_masks(X)])
        return self.fit_features(feats, y)

    def fit_features(self, feats, y):
        feats = np.asarray(feats, dtype=np.float64)
        y = np.asarray(y)
        if feats.ndim != 2 or y.shape != (feats.shape[0],):
            raise ValueError("need one label per feature row")
        present = set(y.tolist())
        self.classes_ = np.array([s for s in SHAPES if s in present] + sorted(present - set(SHAPES)))
        scale = np.ptp(feats, axis=0)
        self.scale_ = np.where(scale > 0, scale, 1.0)
        self.centroids_ = np.stack([feats[y == c].mean(axis=0) for c in self.classes_])
        return self

    def distances(self, X) -> np.ndarray:
        check_is_fitted(self, "centroids_")
        feats = np.stack([shape_features(m) for m in check_masks(X)])
        diff = (feats[:, None, :] - self.centroids_[None, :, :]) / self.scale_
        return np.sqrt(np.sum(diff**2, axis=2))

    def predict_proba(self, X) -> np.ndarray:
        return softmax(-self.distances(X), self.temperature)


def build_shape_samples(seed: int = 0, per_class: int = 40, size_range=(40, 120)):
    """Rendered masks of every shape at seeded random sizes and rotations."""
    rng = np.random.default_rng([seed, 0x5AFE])
    masks, labels = [], []
    for shape in SHAPES:
        for _ in range(per_class):
            size = int(rng.integers(size_range[0], size_range[1] + 1))
            masks.append(render_mask(shape, size, float(rng.uniform(0.0, 360.0))))
            labels.append(shape)
    return masks, labels

"""Unsupervised segmentation of a region crop into candidate binary masks.

Pixels are described in HLS, decorrelated with PCA, min-max scaled and
clustered with k-means. Every non-empty cluster becomes one mask, and its
coordinate-wise median is mapped back to an HLS center color.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage
from sklearn.base import BaseEstimator, ClusterMixin

from .imgcore import denoise, hls_to_rgb, rgb_to_hls, write_image
from .numerics import KMeans, MinMaxScaler, PCA, coordinatewise_median
from .validation import check_image

HUE_ENCODINGS = ("linear", "cone")


@dataclass
class Segment:
    mask: np.ndarray
    center_hls: tuple[float, float, float]
    population: int

    def __post_init__(self):
        self.population = int(self.population)
        if self.population <= 0 or self.population != int(self.mask.sum()):
            raise ValueError("population must equal the (positive) mask pixel count")


@dataclass(frozen=True)
class SegmentationConfig:
    """Segmentation settings.

    ``denoise``, ``edge_weight_scale`` and ``merge_distance`` are optional
    refinements; set them to ``False``/``None`` for the plain method.
    ``edge_weight_scale`` (8-bit levels) down-weights pixels whose 3x3
    neighbourhood spans a wide color range when fitting k-means, so blur
    transitions do not attract their own centers. ``merge_distance`` joins
    clusters whose center colors lie within that RGB L1 distance.
    """

    k: int = 5
    variance_target: float = 0.99
    seed: int = 0
    hue_encoding: str = "cone"
    max_iter: int = 100
    denoise: bool = True
    edge_weight_scale: float | None = None
    merge_distance: float | None = 40.0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if not 0 < self.variance_target <= 1:
            raise ValueError("variance_target must lie in (0, 1]")
        if self.hue_encoding not in HUE_ENCODINGS:
            raise ValueError(f"hue_encoding must be one of {HUE_ENCODINGS}")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.edge_weight_scale is not None and self.edge_weight_scale <= 0:
            raise ValueError("edge_weight_scale must be positive or None")
        if self.merge_distance is not None and self.merge_distance < 0:
            raise ValueError("merge_distance must be non-negative or None")


def hls_features(hls: np.ndarray, encoding: str = "linear") -> np.ndarray:
    """Per-pixel feature rows from an ``(..., 3)`` HLS array.

    ``linear`` uses ``(h / 360, l, s)``. ``cone`` places colors in the
    double cone ``(l, c cos h, c sin h)`` with chroma ``c = s (1 - |2l - 1|)``,
    which keeps red continuous across 0/360 degrees and collapses the
    unstable hue of near-gray pixels.
    """
    flat = np.asarray(hls, dtype=np.float64).reshape(-1, 3)
    h, l, s = flat[:, 0], flat[:, 1], flat[:, 2]
    if encoding == "linear":
        return np.stack([h / 360.0, l, s], axis=1)
    if encoding == "cone":
        c = s * (1.0 - np.abs(2.0 * l - 1.0))
        rad = np.radians(h)
        return np.stack([l, c * np.cos(rad), c * np.sin(rad)], axis=1)
    raise ValueError(f"unknown hue encoding {encoding!r}")


def features_to_hls(features: np.ndarray, encoding: str = "linear", clamp: bool = True) -> np.ndarray:
    """Inverse of :func:`hls_features` for ``(n, 3)`` rows."""
    f = np.atleast_2d(np.asarray(features, dtype=np.float64))
    if encoding == "linear":
        out = np.stack([f[:, 0] * 360.0, f[:, 1], f[:, 2]], axis=1)
    elif encoding == "cone":
        l = f[:, 0]
        c = np.hypot(f[:, 1], f[:, 2])
        h = np.degrees(np.arctan2(f[:, 2], f[:, 1])) % 360.0
        span = 1.0 - np.abs(2.0 * np.clip(l, 0.0, 1.0) - 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(span > 0, c / span, 0.0)
        h = np.where(c > 0, h, 0.0)
        out = np.stack([h, l, s], axis=1)
    else:
        raise ValueError(f"unknown hue encoding {encoding!r}")
    if clamp:
        out[:, 0] = np.clip(out[:, 0], 0.0, np.nextafter(360.0, 0.0))
        out[:, 1:] = np.clip(out[:, 1:], 0.0, 1.0)
    return out


def reconstruct_center(
    model_pca: PCA, model_scaler: MinMaxScaler, scaled_points, encoding: str = "linear", clamp: bool = True
) -> tuple[float, float, float]:
    """HLS color of the coordinate-wise median of points in scaled PCA space."""
    pts = np.asarray(scaled_points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[0] == 0:
        raise ValueError("cannot reconstruct a center from an empty point set")
    med = coordinatewise_median(pts)[None, :]
    feats = model_pca.inverse_transform(model_scaler.inverse_transform(med))
    h, l, s = features_to_hls(feats, encoding, clamp)[0]
    return float(h), float(l), float(s)


def edge_weights(crop: np.ndarray, scale: float) -> np.ndarray:
    """Per-pixel weights ``1 / (1 + (r / scale)^2)`` from the local 3x3 color range ``r``."""
    img = crop.astype(np.int16)
    rng = ndimage.maximum_filter(img, size=(3, 3, 1)) - ndimage.minimum_filter(img, size=(3, 3, 1))
    r = rng.max(axis=2).astype(np.float64)
    return 1.0 / (1.0 + (r / scale) ** 2)


class MaskSegmenter(ClusterMixin, BaseEstimator):
    """Cluster the pixels of one RGB crop into at most ``k`` masks.

    Parameters mirror :class:`SegmentationConfig`. After ``fit`` the fitted
    ``pca_``, ``scaler_`` and ``kmeans_`` models are exposed together with
    ``labels_`` (segment index per pixel, shaped like the crop) and
    ``segments_``.
    """

    def __init__(
        self,
        k=5,
        variance_target=0.99,
        seed=0,
        hue_encoding="cone",
        max_iter=100,
        denoise=True,
        edge_weight_scale=None,
        merge_distance=40.0,
    ):
        self.k = k
        self.variance_target = variance_target
        self.seed = seed
        self.hue_encoding = hue_encoding
        self.max_iter = max_iter
        self.denoise = denoise
        self.edge_weight_scale = edge_weight_scale
        self.merge_distance = merge_distance

    @classmethod
    def from_config(cls, cfg: SegmentationConfig) -> MaskSegmenter:
        return cls(**asdict(cfg))

    def fit(self, X, y=None):
        SegmentationConfig(**self.get_params())
        crop = check_image(X, min_size=8, name="crop")
        if self.denoise:
            crop = denoise(crop)
        h, w = crop.shape[:2]
        feats = hls_features(rgb_to_hls(crop), self.hue_encoding)
        self.pca_ = PCA(self.variance_target).fit(feats)
        self.scaler_ = MinMaxScaler().fit(self.pca_.transform(feats))
        scaled = self.scaler_.transform(self.pca_.transform(feats))
        weights = None
        if self.edge_weight_scale is not None:
            weights = edge_weights(crop, self.edge_weight_scale).ravel()
        self.kmeans_ = KMeans(self.k, seed=self.seed, max_iter=self.max_iter).fit(scaled, sample_weight=weights)
        groups = [np.flatnonzero(self.kmeans_.labels_ == j) for j in range(self.k)]
        groups = [g for g in groups if g.size]
        centers = [reconstruct_center(self.pca_, self.scaler_, scaled[g], self.hue_encoding) for g in groups]
        if self.merge_distance is not None:
            groups, centers = self._merge(groups, centers, scaled)
        labels = np.empty(h * w, dtype=np.int64)
        segments = []
        for j, (g, c) in enumerate(zip(groups, centers)):
            labels[g] = j
            mask = np.zeros(h * w, dtype=bool)
            mask[g] = True
            segments.append(Segment(mask.reshape(h, w), c, g.size))
        self.labels_ = labels.reshape(h, w)
        self.segments_ = segments
        return self

    def _merge(self, groups, centers, scaled):
        """Repeatedly join the closest pair of clusters while their center
        colors are within ``merge_distance`` (RGB L1)."""
        groups, centers = list(groups), list(centers)
        while len(groups) > 1:
            rgb = hls_to_rgb(np.array(centers)).astype(np.int64)
            dist = np.abs(rgb[:, None, :] - rgb[None, :, :]).sum(axis=2)
            dist[np.diag_indices(len(groups))] = np.iinfo(np.int64).max
            a, b = np.unravel_index(np.argmin(dist), dist.shape)
            if dist[a, b] > self.merge_distance:
                break
            a, b = min(a, b), max(a, b)
            groups[a] = np.sort(np.concatenate([groups[a], groups[b]]))
            centers[a] = reconstruct_center(self.pca_, self.scaler_, scaled[groups[a]], self.hue_encoding)
            del groups[b], centers[b]
        return groups, centers

    def transform(self, X):
        """Segments of ``X`` (refits, since every crop gets its own models)."""
        return self.fit(X).segments_


def segment(crop, cfg: SegmentationConfig | None = None) -> list[Segment]:
    """Candidate masks of ``crop``, one per non-empty cluster."""
    cfg = cfg or SegmentationConfig()
    return MaskSegmenter.from_config(cfg).fit(crop).segments_


def dump_segments(segments, out_dir, stem: str) -> None:
    """Write one PNG per mask plus a JSON sidecar with centers and populations."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = []
    for i, seg in enumerate(segments):
        name = f"{stem}_mask{i}.png"
        write_image(out / name, seg.mask)
        meta.append({"mask": name, "center_hls": list(seg.center_hls), "population": seg.population})
    (out / f"{stem}_segments.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


"""Region-of-interest detection on full frames.

The detector reduces the frame to a handful of colors with k-means, takes
the HSV value channel, median-filters it, runs Canny and turns every
8-connected edge component into a box. Boxes are padded, filtered by size
and de-duplicated by IOU before crops are cut from the original frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .imgcore import BoundingBox, crop, denoise, iou, rgb_to_hsv
from .numerics import KMeans
from .validation import check_gray, check_image, check_mask

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)

# Above this many distinct colors, quantisation clusters 5-bit color bins
# (weighted by pixel count) instead of exact colors.
_MAX_EXACT_COLORS = 8192


@dataclass(frozen=True)
class RoiConfig:
    quantize_k: int = 16
    canny_low: float = 40.0
    canny_high: float = 120.0
    min_box_area: float = 1e-4
    max_box_area: float = 0.25
    iou_suppress_threshold: float = 0.5
    suppress_max_rounds: int = 5
    contain_suppress_threshold: float | None = 0.9
    box_margin: float = 0.1
    quantize_max_iter: int = 30

    def __post_init__(self):
        if self.quantize_k < 2:
            raise ValueError("quantize_k must be >= 2")
        if not self.canny_low < self.canny_high:
            raise ValueError("canny_low must be below canny_high")
        if not 0 < self.min_box_area < self.max_box_area <= 1:
            raise ValueError("need 0 < min_box_area < max_box_area <= 1")
        if not 0 < self.iou_suppress_threshold < 1:
            raise ValueError("iou_suppress_threshold must lie in (0, 1)")
        if self.suppress_max_rounds < 1:
            raise ValueError("suppress_max_rounds must be >= 1")
        if self.contain_suppress_threshold is not None and not 0 < self.contain_suppress_threshold <= 1:
            raise ValueError("contain_suppress_threshold must lie in (0, 1]")
        if self.box_margin < 0:
            raise ValueError("box_margin must be non-negative")
        if self.quantize_max_iter < 1:
            raise ValueError("quantize_max_iter must be >= 1")


@dataclass
class RegionProposal:
    box: BoundingBox
    crop: np.ndarray


@dataclass
class RoiTrace:
    """Intermediate products kept for debugging dumps."""

    quantized: np.ndarray
    value: np.ndarray
    edges: np.ndarray
    raw_boxes: list[BoundingBox] = field(default_factory=list)
    kept_boxes: list[BoundingBox] = field(default_factory=list)


def _quantize(img: np.ndarray, k: int, seed: int, max_iter: int) -> tuple[np.ndarray, np.ndarray]:
    """Palette ``(m, 3)`` uint8 and per-pixel palette index, ``m <= k``."""
    pixels = img.reshape(-1, 3).astype(np.int64)
    packed = (pixels[:, 0] << 16) | (pixels[:, 1] << 8) | pixels[:, 2]
    colors, inverse, counts = np.unique(packed, return_inverse=True, return_counts=True)
    exact = np.stack([colors >> 16, (colors >> 8) & 255, colors & 255], axis=1).astype(np.float64)
    if len(colors) <= _MAX_EXACT_COLORS:
        points, weights = exact, counts
    else:
        bins = (exact // 8).astype(np.int64)
        key = (bins[:, 0] << 10) | (bins[:, 1] << 5) | bins[:, 2]
        keys, bin_of = np.unique(key, return_inverse=True)
        weights = np.bincount(bin_of, weights=counts)
        points = np.stack(
            [np.bincount(bin_of, weights=counts * exact[:, d]) / weights for d in range(3)], axis=1
        )
    km = KMeans(n_clusters=min(k, len(points)), seed=seed, max_iter=max_iter)
    km.fit(points, sample_weight=weights)
    palette = np.clip(np.rint(km.cluster_centers_), 0, 255).astype(np.uint8)
    if points is exact:
        color_label = km.labels_
    else:
        color_label = km.predict(exact)
    return palette, color_label[inverse].reshape(img.shape[:2])


def quantize_colors(img, k: int = 16, seed: int = 0, max_iter: int = 100) -> np.ndarray:
    """Replace every pixel by its k-means color center (at most ``k`` colors)."""
    if k < 2:
        raise ValueError("k must be >= 2")
    img = check_image(img)
    palette, labels = _quantize(img, k, seed, max_iter)
    return palette[labels]


def _gaussian_kernel(size: int = 5, sigma: float = 1.4) -> np.ndarray:
    x = np.arange(size) - size // 2
    g = np.exp(-(x**2) / (2 * sigma**2))
    return (g / g.sum()).astype(np.float32)


_TAN_22_5 = np.tan(np.radians(22.5))
_TAN_67_5 = np.tan(np.radians(67.5))


def _non_max_suppression(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    ax, ay = np.abs(gx), np.abs(gy)
    horizontal = ay < ax * _TAN_22_5
    vertical = ay >= ax * _TAN_67_5
    diagonal = ~(horizontal | vertical)
    same_sign = (gx * gy) > 0
    padded = np.pad(mag, 1)
    h, w = mag.shape

    def shifted(dy, dx):
        return padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]

    # neighbour offsets along the gradient (rows grow downwards)
    bins = [
        (horizontal, (0, -1), (0, 1)),
        (diagonal & same_sign, (-1, -1), (1, 1)),
        (vertical, (-1, 0), (1, 0)),
        (diagonal & ~same_sign, (-1, 1), (1, -1)),
    ]
    keep = np.zeros(mag.shape, dtype=bool)
    for sel, before, after in bins:
        # strict on one side so a two-pixel plateau yields a one-pixel line
        keep |= sel & (mag > shifted(*before)) & (mag >= shifted(*after))
    return np.where(keep & (mag > 0), mag, 0.0)


def detect_edges(gray, low: float, high: float) -> np.ndarray:
    """Canny edges of an 8-bit-scaled grayscale plane.

    5x5 Gaussian (sigma 1.4), Sobel gradients, non-maximum suppression and
    double-threshold hysteresis with 8-connectivity.
    """
    if not low < high:
        raise ValueError("low threshold must be below high threshold")
    g = check_gray(gray).astype(np.float32)
    kernel = _gaussian_kernel()
    g = ndimage.correlate1d(g, kernel, axis=0, mode="nearest")
    g = ndimage.correlate1d(g, kernel, axis=1, mode="nearest")
    gx = ndimage.sobel(g, axis=1, mode="nearest")
    gy = ndimage.sobel(g, axis=0, mode="nearest")
    thin = _non_max_suppression(np.hypot(gx, gy), gx, gy)
    candidate = thin >= low
    strong = thin >= high
    labels, n = ndimage.label(candidate, structure=EIGHT_CONNECTED)
    if n == 0:
        return candidate
    has_strong = np.zeros(n + 1, dtype=bool)
    has_strong[np.unique(labels[strong])] = True
    has_strong[0] = False
    return has_strong[labels]


def extract_boxes(edges) -> list[BoundingBox]:
    """One tight box per 8-connected component of edge pixels."""
    mask = check_mask(edges)
    labels, _ = ndimage.label(mask, structure=EIGHT_CONNECTED)
    return [
        BoundingBox(sl[1].start, sl[0].start, sl[1].stop, sl[0].stop)
        for sl in ndimage.find_objects(labels)
        if sl is not None
    ]


def filter_boxes(boxes, cfg: RoiConfig, frame_area: float) -> list[BoundingBox]:
    """Keep boxes whose area share of the frame lies in the closed size band."""
    return [b for b in boxes if cfg.min_box_area <= b.area / frame_area <= cfg.max_box_area]


def _redundant(box: BoundingBox, kept, iou_threshold, contain_threshold) -> bool:
    for other in kept:
        if iou(box, other) > iou_threshold:
            return True
        if contain_threshold is not None and box.intersection_area(other) >= contain_threshold * box.area:
            return True
    return False


def suppress_redundant(
    boxes,
    iou_threshold: float = 0.5,
    max_rounds: int = 5,
    contain_threshold: float | None = None,
) -> list[BoundingBox]:
    """Greedy suppression of overlapping boxes, largest first.

    A box survives a pass only if its IOU with every box kept so far is at
    most ``iou_threshold`` (and, when ``contain_threshold`` is set, it is
    not mostly covered by a kept box). Passes repeat until nothing changes
    or ``max_rounds`` is reached.
    """
    if not 0 < iou_threshold < 1:
        raise ValueError("iou_threshold must lie in (0, 1)")
    current = list(boxes)
    for _ in range(max_rounds):
        ordered = sorted(current, key=lambda b: (-b.area, b.as_tuple()))
        kept: list[BoundingBox] = []
        for b in ordered:
            if not _redundant(b, kept, iou_threshold, contain_threshold):
                kept.append(b)
        if kept == current:
            break
        current = kept
    return current


def propose_regions(frame, cfg: RoiConfig | None = None, seed: int = 0, trace: bool = False):
    """Region proposals for a full frame, cropped from the original pixels.

    Returns the proposal list, or ``(proposals, RoiTrace)`` with ``trace``.
    """
    cfg = cfg or RoiConfig()
    frame = check_image(frame, min_size=32, name="frame")
    h, w = frame.shape[:2]
    palette, labels = _quantize(frame, cfg.quantize_k, seed, cfg.quantize_max_iter)
    # the median commutes with taking a channel, so filter the value plane only
    value = np.rint(rgb_to_hsv(palette)[:, 2] * 255.0).astype(np.uint8)[labels]
    value = denoise(value)
    edges = detect_edges(value, cfg.canny_low, cfg.canny_high)
    raw = extract_boxes(edges)
    padded = [b.dilate(cfg.box_margin, w, h) for b in raw]
    sized = filter_boxes(padded, cfg, float(w * h))
    kept = suppress_redundant(
        sized, cfg.iou_suppress_threshold, cfg.suppress_max_rounds, cfg.contain_suppress_threshold
    )
    proposals = [RegionProposal(box=b, crop=crop(frame, b)) for b in kept]
    if trace:
        return proposals, RoiTrace(palette[labels], value, edges, raw, kept)
    return proposals

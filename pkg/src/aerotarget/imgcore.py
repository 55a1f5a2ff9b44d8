"""Pixel containers, color-space conversions, boxes and denoising.

Images are plain numpy arrays indexed ``[row, col]``:

* RGB: ``(H, W, 3)`` uint8.
* HSV: ``(H, W, 3)`` float64 with hue in degrees ``[0, 360)`` and
  saturation/value as fractions.
* HLS: same layout as HSV with channels (hue, lightness, saturation).
* Binary masks: ``(H, W)`` bool, ``True`` is foreground.

The conversion functions accept any ``(..., 3)`` array so they work equally
on whole images, pixel lists and single triples. Achromatic pixels get hue 0.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .validation import check_image, check_mask


def _split_rgb(rgb) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    arr = np.asarray(rgb, dtype=np.float64)
    if arr.shape[-1:] != (3,):
        raise ValueError(f"expected trailing RGB axis of length 3, got shape {arr.shape}")
    arr = arr / 255.0
    return arr[..., 0], arr[..., 1], arr[..., 2]


def _hue(r, g, b, mx, chroma) -> np.ndarray:
    safe = np.where(chroma > 0, chroma, 1.0)
    h = np.where(
        mx == r,
        ((g - b) / safe) % 6.0,
        np.where(mx == g, (b - r) / safe + 2.0, (r - g) / safe + 4.0),
    )
    h = np.where(chroma > 0, h * 60.0, 0.0)
    return np.where(h >= 360.0, h - 360.0, h)


def rgb_to_hsv(img) -> np.ndarray:
    r, g, b = _split_rgb(img)
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    chroma = mx - mn
    s = np.where(mx > 0, chroma / np.where(mx > 0, mx, 1.0), 0.0)
    return np.stack([_hue(r, g, b, mx, chroma), s, mx], axis=-1)


def rgb_to_hls(img) -> np.ndarray:
    r, g, b = _split_rgb(img)
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    chroma = mx - mn
    light = (mx + mn) / 2.0
    denom = 1.0 - np.abs(2.0 * light - 1.0)
    s = np.where(chroma > 0, chroma / np.where(denom > 0, denom, 1.0), 0.0)
    return np.stack([_hue(r, g, b, mx, chroma), light, np.clip(s, 0.0, 1.0)], axis=-1)


def _from_hue_chroma(h, chroma, m) -> np.ndarray:
    hp = (np.asarray(h, dtype=np.float64) % 360.0) / 60.0
    x = chroma * (1.0 - np.abs(hp % 2.0 - 1.0))
    zero = np.zeros_like(x)
    sector = np.floor(hp).astype(int) % 6
    r = np.choose(sector, [chroma, x, zero, zero, x, chroma])
    g = np.choose(sector, [x, chroma, chroma, x, zero, zero])
    b = np.choose(sector, [zero, zero, x, chroma, chroma, x])
    rgb = np.stack([r + m, g + m, b + m], axis=-1)
    return np.clip(np.rint(rgb * 255.0), 0, 255).astype(np.uint8)


def hsv_to_rgb(img) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    h, s, v = arr[..., 0], arr[..., 1], arr[..., 2]
    chroma = v * s
    return _from_hue_chroma(h, chroma, v - chroma)


def hls_to_rgb(img) -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    h, light, s = arr[..., 0], arr[..., 1], arr[..., 2]
    chroma = (1.0 - np.abs(2.0 * light - 1.0)) * s
    return _from_hue_chroma(h, chroma, light - chroma / 2.0)


@dataclass(frozen=True, order=True)
class BoundingBox:
    """Axis-aligned half-open box ``[x_min, x_max) x [y_min, y_max)``."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    def __post_init__(self):
        for name in ("x_min", "y_min", "x_max", "y_max"):
            value = getattr(self, name)
            if int(value) != value:
                raise ValueError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"degenerate box {self.as_tuple()}")

    @property
    def width(self) -> int:
        return self.x_max - self.x_min

    @property
    def height(self) -> int:
        return self.y_max - self.y_min

    @property
    def area(self) -> int:
        return self.width * self.height

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)

    def to_dict(self) -> dict:
        return {"x_min": self.x_min, "y_min": self.y_min, "x_max": self.x_max, "y_max": self.y_max}

    @classmethod
    def from_dict(cls, d: dict) -> BoundingBox:
        return cls(d["x_min"], d["y_min"], d["x_max"], d["y_max"])

    def intersection_area(self, other: BoundingBox) -> int:
        w = min(self.x_max, other.x_max) - max(self.x_min, other.x_min)
        h = min(self.y_max, other.y_max) - max(self.y_min, other.y_min)
        return max(w, 0) * max(h, 0)

    def fits(self, width: int, height: int) -> bool:
        return self.x_min >= 0 and self.y_min >= 0 and self.x_max <= width and self.y_max <= height

    def dilate(self, fraction: float, width: int, height: int) -> BoundingBox:
        """Grow each side by ``fraction`` of the box extent, clamped to the frame."""
        dx = int(round(self.width * fraction))
        dy = int(round(self.height * fraction))
        return BoundingBox(
            max(self.x_min - dx, 0),
            max(self.y_min - dy, 0),
            min(self.x_max + dx, width),
            min(self.y_max + dy, height),
        )


def iou(a: BoundingBox, b: BoundingBox) -> float:
    inter = a.intersection_area(b)
    if inter == 0:
        return 0.0
    return inter / (a.area + b.area - inter)


# Comparator network selecting the median of nine values (19 exchanges).
_MEDIAN9_NETWORK = (
    (1, 2), (4, 5), (7, 8), (0, 1), (3, 4), (6, 7), (1, 2), (4, 5), (7, 8), (0, 3),
    (5, 8), (4, 7), (3, 6), (1, 4), (2, 5), (4, 7), (4, 2), (6, 4), (4, 2),
)


def _median3x3(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape[:2]
    padded = np.pad(plane, [(1, 1), (1, 1)] + [(0, 0)] * (plane.ndim - 2), mode="edge")
    p = [padded[dy : dy + h, dx : dx + w] for dy in range(3) for dx in range(3)]
    for a, b in _MEDIAN9_NETWORK:
        p[a], p[b] = np.minimum(p[a], p[b]), np.maximum(p[a], p[b])
    return p[4]


def denoise(img) -> np.ndarray:
    """3x3 median filter per channel; borders use clamped (nearest) neighbours."""
    arr = np.asarray(img)
    if arr.ndim not in (2, 3):
        raise ValueError(f"expected a 2-D or 3-D image, got shape {arr.shape}")
    return _median3x3(arr)


def crop(img, box: BoundingBox) -> np.ndarray:
    arr = np.asarray(img)
    h, w = arr.shape[:2]
    if not box.fits(w, h):
        raise ValueError(f"box {box.as_tuple()} exceeds image bounds {w}x{h}")
    return arr[box.y_min : box.y_max, box.x_min : box.x_max].copy()


def read_image(path) -> np.ndarray:
    """Decode a PNG/JPEG file into an 8-bit RGB array."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()


def write_image(path, img) -> None:
    """Encode an RGB image (or binary mask) to ``path``; format from the suffix.

    The file is written to a temporary sibling first and renamed into place.
    """
    arr = np.asarray(img)
    if arr.ndim == 2:
        pil = Image.fromarray(check_mask(arr).astype(np.uint8) * 255)
    else:
        pil = Image.fromarray(check_image(arr))
    path = Path(path)
    fmt = {".png": "PNG", ".jpg": "JPEG", ".jpeg": "JPEG"}.get(path.suffix.lower())
    if fmt is None:
        raise ValueError(f"unsupported image format: {path.suffix}")
    tmp = path.with_name(f".{path.name}.tmp")
    pil.save(tmp, format=fmt)
    os.replace(tmp, path)

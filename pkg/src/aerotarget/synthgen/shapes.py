"""Canonical shape geometry and anti-alias-free rasterisation.

Every shape lives in a canonical frame whose bounding box is centred on the
origin with its larger side equal to 1 (y grows downwards). Rasterisation
maps pixel centres back into that frame and tests membership, so rotations
never resample a bitmap.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import ndimage

from ..taxonomy import CHARACTERS, SHAPES
from .glyphs import glyph_extent

STAR_INNER_RATIO = 0.48
CROSS_ARM = 0.4
RECTANGLE_ASPECT = 0.6
MAX_CHAR_SCALE = 0.55
CHAR_MARGIN = 0.04  # clearance between glyph box and shape edge, shape units


def _normalise(pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=np.float64)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    return (pts - (lo + hi) / 2.0) / (hi - lo).max()


def _regular(n: int) -> np.ndarray:
    a = np.radians(-90.0 + 360.0 * np.arange(n) / n)
    return _normalise(np.stack([np.cos(a), np.sin(a)], axis=1))


@lru_cache(maxsize=None)
def polygon(shape: str) -> np.ndarray | None:
    """Vertices of a polygonal shape, or ``None`` for curved ones."""
    if shape == "square":
        return _normalise([(-1, -1), (1, -1), (1, 1), (-1, 1)])
    if shape == "rectangle":
        a = RECTANGLE_ASPECT
        return _normalise([(-1, -a), (1, -a), (1, a), (-1, a)])
    if shape == "triangle":
        return _normalise([(0, -math.sqrt(3) / 2), (0.5, 0), (-0.5, 0)])
    if shape == "trapezoid":
        return _normalise([(-0.275, -0.3), (0.275, -0.3), (0.5, 0.3), (-0.5, 0.3)])
    if shape in ("pentagon", "hexagon", "heptagon", "octagon"):
        return _regular({"pentagon": 5, "hexagon": 6, "heptagon": 7, "octagon": 8}[shape])
    if shape == "star":
        a = np.radians(-90.0 + 36.0 * np.arange(10))
        r = np.where(np.arange(10) % 2 == 0, 1.0, STAR_INNER_RATIO)
        return _normalise(np.stack([r * np.cos(a), r * np.sin(a)], axis=1))
    if shape == "cross":
        w = CROSS_ARM / 2.0
        return _normalise(
            [(-w, -0.5), (w, -0.5), (w, -w), (0.5, -w), (0.5, w), (w, w),
             (w, 0.5), (-w, 0.5), (-w, w), (-0.5, w), (-0.5, -w), (-w, -w)]
        )
    if shape in ("circle", "semi-circle", "quarter-circle"):
        return None
    raise ValueError(f"unknown shape {shape!r}")


def _inside_polygon(u, v, verts) -> np.ndarray:
    inside = np.zeros(u.shape, dtype=bool)
    xj, yj = verts[-1]
    for xi, yi in verts:
        crosses = (yi > v) != (yj > v)
        with np.errstate(divide="ignore", invalid="ignore"):
            x_at = (xj - xi) * (v - yi) / (yj - yi) + xi
        inside ^= crosses & (u < x_at)
        xj, yj = xi, yi
    return inside


def membership(shape: str, u, v) -> np.ndarray:
    """Whether canonical-frame points lie inside ``shape``."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if shape == "circle":
        return u * u + v * v <= 0.25
    if shape == "semi-circle":
        # flat side down; bounding box 1 x 0.5
        return (u * u + (v - 0.25) ** 2 <= 0.25) & (v <= 0.25)
    if shape == "quarter-circle":
        # right angle at the lower-left corner; bounding box 1 x 1
        return ((u + 0.5) ** 2 + (v - 0.5) ** 2 <= 1.0) & (u >= -0.5) & (v <= 0.5)
    return _inside_polygon(u, v, polygon(shape))


def canonical_outline(shape: str, n: int = 360) -> np.ndarray:
    """Boundary points of ``shape`` in the canonical frame."""
    poly = polygon(shape)
    if poly is not None:
        return poly
    t = np.radians(np.linspace(0.0, 360.0, n, endpoint=False))
    if shape == "circle":
        return 0.5 * np.stack([np.cos(t), np.sin(t)], axis=1)
    if shape == "semi-circle":
        t = np.radians(np.linspace(180.0, 360.0, n))
        return np.stack([0.5 * np.cos(t), 0.25 + 0.5 * np.sin(t)], axis=1)
    t = np.radians(np.linspace(270.0, 360.0, n))
    arc = np.stack([-0.5 + np.cos(t), 0.5 + np.sin(t)], axis=1)
    return np.vstack([[(-0.5, 0.5)], arc])


def to_canonical(x, y, center, size, rotation):
    """Map frame coordinates into the canonical frame of a rotated shape."""
    c, s = math.cos(math.radians(rotation)), math.sin(math.radians(rotation))
    dx = np.asarray(x, dtype=np.float64) - center[0]
    dy = np.asarray(y, dtype=np.float64) - center[1]
    return (dx * c - dy * s) / size, (dx * s + dy * c) / size


def from_canonical(u, v, center, size, rotation):
    c, s = math.cos(math.radians(rotation)), math.sin(math.radians(rotation))
    u = np.asarray(u, dtype=np.float64) * size
    v = np.asarray(v, dtype=np.float64) * size
    return center[0] + u * c + v * s, center[1] - u * s + v * c


def rotated_extent(shape: str, size: float, rotation: float) -> tuple[float, float, float, float]:
    """Frame-space bounds (x0, y0, x1, y1) of a shape centred on the origin."""
    pts = canonical_outline(shape)
    x, y = from_canonical(pts[:, 0], pts[:, 1], (0.0, 0.0), size, rotation)
    return float(x.min()), float(y.min()), float(x.max()), float(y.max())


def rasterize(shape: str, size: float, rotation: float, center, x0: int, y0: int, w: int, h: int):
    """Rasterise onto the pixel window ``[x0, x0+w) x [y0, y0+h)`` (pixel centres)."""
    ys, xs = np.mgrid[y0 : y0 + h, x0 : x0 + w].astype(np.float64) + 0.5
    u, v = to_canonical(xs, ys, center, size, rotation)
    return membership(shape, u, v)


def _trim(mask: np.ndarray) -> np.ndarray:
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    return mask[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1]


def render_mask(shape: str, size: int, rotation: float = 0.0) -> np.ndarray:
    """Binary mask of ``shape`` at ``size`` pixels extent, cropped to its foreground."""
    if shape not in SHAPES:
        raise ValueError(f"unknown shape {shape!r}")
    if size < 16:
        raise ValueError(f"size must be >= 16 pixels, got {size}")
    pad = int(math.ceil(size * (math.sqrt(2) - 1) / 2.0)) + 2
    n = int(size) + 2 * pad
    mask = rasterize(shape, size, rotation, (n / 2.0, n / 2.0), 0, 0, n, n)
    return _trim(mask)


@lru_cache(maxsize=None)
def _max_glyph_box() -> tuple[float, float]:
    ext = np.array([glyph_extent(c) for c in CHARACTERS])
    return float(ext[:, 0].max()), float(ext[:, 1].max())


def _box_fits(shape, cu, cv, half_w, half_h) -> bool:
    t = np.linspace(-1.0, 1.0, 41)
    one = np.ones_like(t)
    u = np.concatenate([t * half_w, t * half_w, -one * half_w, one * half_w]) + cu
    v = np.concatenate([-one * half_h, one * half_h, t * half_h, t * half_h]) + cv
    return bool(membership(shape, u, v).all())


@lru_cache(maxsize=None)
def character_placement(shape: str) -> tuple[float, float, float]:
    """Canonical centre and glyph height that keep every glyph inside ``shape``.

    Searches centres around the inscribed-circle centre for the largest glyph
    box (widest glyph, plus ``CHAR_MARGIN``) that fits, capped at
    ``MAX_CHAR_SCALE``.
    """
    n = 401
    grid = (np.arange(n) + 0.5) / n - 0.5
    uu, vv = np.meshgrid(grid, grid)
    inside = membership(shape, uu, vv)
    dist = ndimage.distance_transform_edt(np.pad(inside, 1))[1:-1, 1:-1]
    # centre of the medial ridge, so elongated shapes keep the glyph centred
    ridge_r, ridge_c = np.nonzero(dist >= dist.max() - 1.0)
    base_u = float(np.round(grid[ridge_c].mean(), 3))
    base_v = float(np.round(grid[ridge_r].mean(), 3))
    gw, gh = _max_glyph_box()

    best = (0.0, base_u, base_v)
    offsets = sorted(np.round(np.arange(-0.12, 0.1201, 0.01), 4), key=lambda d: (abs(d), d))
    candidates = [(base_u, base_v + d) for d in offsets] + [(base_u + d, base_v) for d in offsets]
    for cu, cv in candidates:
        lo, hi = 0.0, MAX_CHAR_SCALE
        if not _box_fits(shape, cu, cv, CHAR_MARGIN, CHAR_MARGIN):
            continue
        for _ in range(30):
            mid = (lo + hi) / 2.0
            if _box_fits(shape, cu, cv, gw * mid / 2 + CHAR_MARGIN, gh * mid / 2 + CHAR_MARGIN):
                lo = mid
            else:
                hi = mid
        if lo > best[0] + 1e-9:
            best = (lo, cu, cv)
    scale, cu, cv = best
    return float(cu), float(cv), float(scale)

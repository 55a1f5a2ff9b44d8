"""Bundled stroke outlines for the 36 alphanumerics.

Each glyph is a list of polylines in a box of height 1 (y grows downwards).
Glyphs are rasterised as thick strokes with round caps, so rendering depends
only on numpy and is identical on every platform. Pairs that rotate into one
another in common fonts (6/9, N/Z, M/W, C/U, 0/O) are drawn with different
proportions or details so a rotation search can still tell them apart.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

STROKE_WIDTH = 0.17  # fraction of glyph height


def _arc(cx, cy, rx, ry, start, stop, n=None):
    if n is None:
        n = max(int(abs(stop - start) / 10), 4)
    t = np.radians(np.linspace(start, stop, n + 1))
    return [(cx + rx * np.cos(a), cy + ry * np.sin(a)) for a in t]


def _line(*pts):
    return [tuple(p) for p in pts]


def _outline_table() -> dict[str, list[list[tuple[float, float]]]]:
    t = {}
    t["A"] = [_line((0, 1), (0.36, 0), (0.72, 1)), _line((0.14, 0.62), (0.58, 0.62))]
    t["B"] = [
        _line((0, 0), (0, 1)),
        _line((0, 0), (0.36, 0)) + _arc(0.36, 0.25, 0.26, 0.25, -90, 90) + _line((0, 0.5)),
        _line((0, 0.5), (0.4, 0.5)) + _arc(0.4, 0.75, 0.28, 0.25, -90, 90) + _line((0, 1)),
    ]
    t["C"] = [_arc(0.42, 0.5, 0.42, 0.5, 45, 315)]
    t["D"] = [
        _line((0, 0), (0, 1)),
        _line((0, 0), (0.28, 0)) + _arc(0.28, 0.5, 0.44, 0.5, -90, 90) + _line((0, 1)),
    ]
    t["E"] = [
        _line((0.65, 0), (0, 0), (0, 1), (0.65, 1)),
        _line((0, 0.5), (0.5, 0.5)),
    ]
    t["F"] = [_line((0.65, 0), (0, 0), (0, 1)), _line((0, 0.48), (0.5, 0.48))]
    t["G"] = [_arc(0.42, 0.5, 0.42, 0.5, 315, 0), _line((0.84, 0.5), (0.46, 0.5))]
    t["H"] = [_line((0, 0), (0, 1)), _line((0.68, 0), (0.68, 1)), _line((0, 0.5), (0.68, 0.5))]
    t["I"] = [_line((0.3, 0), (0.3, 1)), _line((0, 0), (0.6, 0)), _line((0, 1), (0.6, 1))]
    t["J"] = [_line((0.2, 0), (0.7, 0)), _line((0.55, 0), (0.55, 0.7)) + _arc(0.3, 0.7, 0.25, 0.3, 0, 180)]
    t["K"] = [_line((0, 0), (0, 1)), _line((0.66, 0), (0, 0.58)), _line((0.2, 0.42), (0.7, 1))]
    t["L"] = [_line((0, 0), (0, 1), (0.6, 1))]
    t["M"] = [_line((0, 1), (0, 0), (0.4, 0.65), (0.8, 0), (0.8, 1))]
    t["N"] = [_line((0, 1), (0, 0), (0.7, 1), (0.7, 0))]
    t["O"] = [_arc(0.42, 0.5, 0.42, 0.5, 0, 360, 40)]
    t["P"] = [
        _line((0, 1), (0, 0), (0.34, 0)) + _arc(0.34, 0.27, 0.3, 0.27, -90, 90) + _line((0, 0.54)),
    ]
    t["Q"] = [_arc(0.42, 0.5, 0.42, 0.5, 0, 360, 40), _line((0.45, 0.64), (0.88, 1.0))]
    t["R"] = [
        _line((0, 1), (0, 0), (0.34, 0)) + _arc(0.34, 0.27, 0.3, 0.27, -90, 90) + _line((0, 0.54)),
        _line((0.28, 0.54), (0.68, 1)),
    ]
    t["S"] = [_arc(0.35, 0.25, 0.33, 0.25, 330, 90) + _arc(0.35, 0.75, 0.35, 0.25, -90, 150)]
    t["T"] = [_line((0, 0), (0.72, 0)), _line((0.36, 0), (0.36, 1))]
    t["U"] = [_line((0, 0), (0, 0.64)) + _arc(0.35, 0.64, 0.35, 0.36, 180, 0) + _line((0.7, 0))]
    t["V"] = [_line((0, 0), (0.36, 1), (0.72, 0))]
    t["W"] = [_line((0, 0), (0.2, 1), (0.45, 0.35), (0.7, 1), (0.9, 0))]
    t["X"] = [_line((0, 0), (0.7, 1)), _line((0.7, 0), (0, 1))]
    t["Y"] = [_line((0, 0), (0.36, 0.5), (0.72, 0)), _line((0.36, 0.5), (0.36, 1))]
    t["Z"] = [_line((0, 0), (0.7, 0), (0, 1), (0.7, 1))]
    t["0"] = [_arc(0.3, 0.5, 0.3, 0.5, 0, 360, 40), _line((0.12, 0.78), (0.48, 0.22))]
    t["1"] = [_line((0.1, 0.22), (0.35, 0), (0.35, 1)), _line((0.05, 1), (0.65, 1))]
    t["2"] = [_arc(0.33, 0.3, 0.33, 0.3, 190, 400) + _line((0, 1), (0.68, 1))]
    t["3"] = [
        _arc(0.32, 0.26, 0.3, 0.25, 200, 450),
        _arc(0.32, 0.74, 0.34, 0.26, 270, 520),
    ]
    t["4"] = [_line((0.55, 1), (0.55, 0), (0, 0.68), (0.75, 0.68))]
    t["5"] = [_line((0.65, 0), (0.08, 0), (0.06, 0.47)) + _arc(0.34, 0.69, 0.34, 0.31, 218, 510)]
    t["6"] = [
        _arc(0.35, 0.68, 0.33, 0.32, 0, 360, 36),
        _arc(0.5, 0.62, 0.48, 0.6, 180, 285),
    ]
    t["7"] = [_line((0, 0), (0.7, 0), (0.25, 1))]
    t["8"] = [_arc(0.33, 0.25, 0.28, 0.25, 0, 360, 36), _arc(0.33, 0.73, 0.33, 0.27, 0, 360, 36)]
    t["9"] = [_arc(0.35, 0.32, 0.33, 0.32, 0, 360, 36), _line((0.68, 0.32), (0.52, 1.0))]
    return t


@lru_cache(maxsize=None)
def glyph_segments(char: str) -> np.ndarray:
    """Stroke segments ``(m, 4)`` as ``x0, y0, x1, y1``, centred on the glyph box."""
    table = _outline_table()
    if char not in table:
        raise ValueError(f"no outline for character {char!r}")
    segs = []
    for poly in table[char]:
        pts = np.asarray(poly, dtype=np.float64)
        segs.append(np.hstack([pts[:-1], pts[1:]]))
    segs = np.vstack(segs)
    xs = segs[:, [0, 2]]
    ys = segs[:, [1, 3]]
    cx = (xs.min() + xs.max()) / 2.0
    cy = (ys.min() + ys.max()) / 2.0
    segs = segs - np.array([cx, cy, cx, cy])
    segs.setflags(write=False)
    return segs


def glyph_extent(char: str) -> tuple[float, float]:
    """Width and height of the stroked glyph in units of glyph height."""
    segs = glyph_segments(char)
    w = np.ptp(segs[:, [0, 2]]) + STROKE_WIDTH
    h = np.ptp(segs[:, [1, 3]]) + STROKE_WIDTH
    return float(w), float(h)


def _segment_distance(px, py, segs):
    x0, y0, x1, y1 = (segs[:, i][None, :] for i in range(4))
    dx, dy = x1 - x0, y1 - y0
    length2 = dx * dx + dy * dy
    safe = np.where(length2 > 0, length2, 1.0)
    t = np.clip(((px[:, None] - x0) * dx + (py[:, None] - y0) * dy) / safe, 0.0, 1.0)
    qx = x0 + t * dx - px[:, None]
    qy = y0 + t * dy - py[:, None]
    return np.sqrt((qx * qx + qy * qy).min(axis=1))


def glyph_membership(char: str, x, y) -> np.ndarray:
    """Whether glyph-frame points (units of glyph height) lie on a stroke."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    segs = glyph_segments(char)
    out = np.zeros(x.shape, dtype=bool)
    # cull points outside the stroked bounding box before the distance pass
    half = STROKE_WIDTH / 2.0
    near = (
        (x >= segs[:, [0, 2]].min() - half)
        & (x <= segs[:, [0, 2]].max() + half)
        & (y >= segs[:, [1, 3]].min() - half)
        & (y <= segs[:, [1, 3]].max() + half)
    )
    idx = np.flatnonzero(near)
    for start in range(0, idx.size, 65536):
        chunk = idx[start : start + 65536]
        out[chunk] = _segment_distance(x[chunk], y[chunk], segs) <= half
    return out


def render_glyph(char: str, height: float, rotation: float = 0.0) -> np.ndarray:
    """Binary raster of ``char`` with the given glyph height in pixels,
    rotated counter-clockwise by ``rotation`` degrees and trimmed to its ink."""
    if height < 8:
        raise ValueError(f"glyph height must be >= 8 pixels, got {height}")
    n = int(np.ceil(height * 1.6)) + 4
    ys, xs = np.mgrid[0:n, 0:n].astype(np.float64) + 0.5 - n / 2.0
    c, s = np.cos(np.radians(rotation)), np.sin(np.radians(rotation))
    u = (xs * c - ys * s) / height
    v = (xs * s + ys * c) / height
    mask = glyph_membership(char, u, v).reshape(n, n)
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    return mask[rows[0] : rows[-1] + 1, cols[0] : cols[-1] + 1]

"""Color naming by Manhattan distance to the reference table."""

from __future__ import annotations

import numpy as np

from ..imgcore import hls_to_rgb
from ..taxonomy import COLOR_NAMES, COLORS

_REFERENCE = np.array([COLORS[n] for n in COLOR_NAMES], dtype=np.int64)


def nearest_color(rgb) -> str:
    """Reference color with the smallest L1 distance; ties go to the earlier name."""
    rgb = np.asarray(rgb, dtype=np.float64).reshape(3)
    dist = np.abs(_REFERENCE - rgb).sum(axis=1)
    return COLOR_NAMES[int(np.argmin(dist))]


def classify_color(center_hls) -> str:
    """Name of the reference color nearest to an HLS triple."""
    hls = np.asarray(center_hls, dtype=np.float64).reshape(3)
    if not (0 <= hls[0] < 360 and 0 <= hls[1] <= 1 and 0 <= hls[2] <= 1):
        raise ValueError(f"invalid HLS triple {tuple(hls)}")
    return nearest_color(hls_to_rgb(hls))

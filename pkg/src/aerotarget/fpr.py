"""False-positive removal.

Stage one rejects masks that break into too many 8-connected pieces or are
too small to matter. With ``superimposed_shape_regions`` the piece count of
a shape candidate is taken after the character mask is OR-ed in, so the
holes of glyphs such as ``8`` or ``B`` do not count as separate pieces. Stage two rejects masks on which a classifier has no
confident answer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .validation import check_mask

EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class FprConfig:
    max_regions: int = 2
    min_top_probability: float = 0.35
    min_mask_fill: float = 0.01
    discard_border_segments: bool = True
    superimposed_shape_regions: bool = True

    def __post_init__(self):
        if self.max_regions < 1:
            raise ValueError("max_regions must be >= 1")
        if not 0 < self.min_top_probability < 1:
            raise ValueError("min_top_probability must lie in (0, 1)")
        if not 0 <= self.min_mask_fill < 1:
            raise ValueError("min_mask_fill must lie in [0, 1)")


def count_regions(mask) -> int:
    """Number of 8-connected foreground components."""
    mask = check_mask(mask)
    return int(ndimage.label(mask, structure=EIGHT_CONNECTED)[1])


def touches_border(mask) -> bool:
    mask = check_mask(mask)
    return bool(mask[0].any() or mask[-1].any() or mask[:, 0].any() or mask[:, -1].any())


def filter_by_presence(segments, cfg: FprConfig, crop_area: float) -> list:
    """Segments with enough pixels (and, with ``discard_border_segments``,
    clear of the crop border), in order."""
    if crop_area <= 0:
        raise ValueError("crop_area must be positive")
    kept = []
    for seg in segments:
        if seg.population / crop_area < cfg.min_mask_fill:
            continue
        if cfg.discard_border_segments and touches_border(seg.mask):
            continue
        kept.append(seg)
    return kept


def filter_by_structure(segments, cfg: FprConfig, crop_area: float) -> list:
    """Segments that pass :func:`filter_by_presence` and have at most
    ``max_regions`` pieces, in order."""
    return [s for s in filter_by_presence(segments, cfg, crop_area) if count_regions(s.mask) <= cfg.max_regions]


def passes_probability_gate(dist, cfg: FprConfig) -> bool:
    """Whether the most likely class reaches ``min_top_probability`` (inclusive)."""
    probs = np.asarray(getattr(dist, "probabilities", dist), dtype=np.float64)
    if probs.ndim != 1 or probs.size == 0:
        raise ValueError("distribution must be a non-empty vector")
    if np.any(probs < 0) or not np.all(np.isfinite(probs)) or abs(probs.sum() - 1.0) > 1e-6:
        raise ValueError("distribution must be non-negative and sum to 1")
    return bool(probs.max() >= cfg.min_top_probability)

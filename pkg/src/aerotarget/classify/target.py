"""Character-first assembly of a target report from candidate segments."""

from __future__ import annotations

from dataclasses import dataclass

from ..fpr import FprConfig, count_regions, filter_by_presence, passes_probability_gate
from ..imgcore import BoundingBox
from .base import superimpose
from .color import classify_color


@dataclass(frozen=True)
class TargetReport:
    box: BoundingBox
    character: str
    character_color: str
    shape: str
    shape_color: str
    char_confidence: float
    shape_confidence: float

    def to_dict(self) -> dict:
        return {
            "box": self.box.to_dict(),
            "character": self.character,
            "character_color": self.character_color,
            "shape": self.shape,
            "shape_color": self.shape_color,
            "char_confidence": self.char_confidence,
            "shape_confidence": self.shape_confidence,
        }

    @classmethod
    def from_dict(cls, d: dict) -> TargetReport:
        return cls(**{**d, "box": BoundingBox.from_dict(d["box"])})


SELECTION_RULES = ("confidence", "population")


def _best_gated(dists, segments, cfg: FprConfig, rule: str = "confidence"):
    """Index of the preferred segment whose distribution passes the gate, or None.

    ``confidence`` ranks by top probability, then population; ``population``
    ranks by pixel count, then top probability. Remaining ties go to the
    earlier segment.
    """
    if rule not in SELECTION_RULES:
        raise ValueError(f"selection rule must be one of {SELECTION_RULES}")
    best, best_key = None, None
    for i, (dist, seg) in enumerate(zip(dists, segments)):
        key = (dist.confidence, seg.population)
        if rule == "population":
            key = key[::-1]
        if passes_probability_gate(dist, cfg) and (best is None or key > best_key):
            best, best_key = i, key
    return best


def classify_target(
    box, segments, char_model, shape_model, cfg: FprConfig | None = None, shape_selection: str = "population"
):
    """Report for one proposal, or ``None`` when no segment passes a gate.

    ``segments`` is the raw segmentation of the crop; both false-positive
    stages are applied here. The character is chosen first among the
    structurally valid segments (most confident gated mask). Its mask is
    then OR-ed into every other segment and the shape is picked among the
    gated results according to ``shape_selection``.
    """
    cfg = cfg or FprConfig()
    segments = list(segments)
    if not segments:
        return None
    present = filter_by_presence(segments, cfg, segments[0].mask.size)
    chars = [s for s in present if count_regions(s.mask) <= cfg.max_regions]
    if not chars:
        return None
    char_dists = [char_model.predict_distribution(s.mask) for s in chars]
    ci = _best_gated(char_dists, chars, cfg)
    if ci is None:
        return None
    char_seg = chars[ci]
    others, merged = [], []
    for s in present:
        if s is char_seg:
            continue
        m = superimpose(char_seg.mask, s.mask)
        pieces = count_regions(m if cfg.superimposed_shape_regions else s.mask)
        if pieces <= cfg.max_regions:
            others.append(s)
            merged.append(m)
    if not others:
        return None
    shape_dists = [shape_model.predict_distribution(m) for m in merged]
    si = _best_gated(shape_dists, others, cfg, shape_selection)
    if si is None:
        return None
    shape_seg = others[si]
    return TargetReport(
        box=box,
        character=char_dists[ci].label,
        character_color=classify_color(char_seg.center_hls),
        shape=shape_dists[si].label,
        shape_color=classify_color(shape_seg.center_hls),
        char_confidence=char_dists[ci].confidence,
        shape_confidence=shape_dists[si].confidence,
    )

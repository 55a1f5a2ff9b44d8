"""Scoring detections against synthetic ground truth."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

from .imgcore import BoundingBox, iou

MATCH_IOU = 0.3
ATTRIBUTES = ("character", "character_color", "shape", "shape_color")


class SceneMismatchError(ValueError):
    """Detections and manifests do not cover the same scenes."""


@dataclass
class EvalSummary:
    """Detection rate, accuracy over matched detections, false-positive rate.

    Fractions whose denominator is zero are ``None`` (serialized as null).
    ``confusion[attr][true][predicted]`` counts matched detections.
    """

    n_targets: int = 0
    n_detections: int = 0
    n_matched: int = 0
    correct: dict = field(default_factory=lambda: {a: 0 for a in ATTRIBUTES})
    confusion: dict = field(default_factory=lambda: {a: {} for a in ATTRIBUTES})

    @staticmethod
    def _ratio(num, den):
        return num / den if den else None

    @property
    def detected_fraction(self):
        return self._ratio(self.n_matched, self.n_targets)

    @property
    def char_accuracy_on_detected(self):
        return self._ratio(self.correct["character"], self.n_matched)

    @property
    def shape_accuracy_on_detected(self):
        return self._ratio(self.correct["shape"], self.n_matched)

    @property
    def false_positive_fraction(self):
        return self._ratio(self.n_detections - self.n_matched, self.n_detections)

    def to_dict(self) -> dict:
        return {
            "detected_fraction": self.detected_fraction,
            "char_accuracy_on_detected": self.char_accuracy_on_detected,
            "shape_accuracy_on_detected": self.shape_accuracy_on_detected,
            "false_positive_fraction": self.false_positive_fraction,
            "character_color_accuracy_on_detected": self._ratio(self.correct["character_color"], self.n_matched),
            "shape_color_accuracy_on_detected": self._ratio(self.correct["shape_color"], self.n_matched),
            "counts": {
                "targets": self.n_targets,
                "detections": self.n_detections,
                "matched": self.n_matched,
                "false_positives": self.n_detections - self.n_matched,
            },
            "confusion": self.confusion,
        }


def match_boxes(detected, truth, threshold: float = MATCH_IOU) -> list[tuple[int, int]]:
    """Greedy one-to-one matching, highest IOU first; pairs ``(det, truth)``."""
    pairs = []
    for i, d in enumerate(detected):
        for j, t in enumerate(truth):
            v = iou(d, t)
            if v >= threshold:
                pairs.append((-v, i, j))
    pairs.sort()
    used_d, used_t, out = set(), set(), []
    for _, i, j in pairs:
        if i in used_d or j in used_t:
            continue
        used_d.add(i)
        used_t.add(j)
        out.append((i, j))
    return sorted(out)


def evaluate(detections: dict, manifests: dict, threshold: float = MATCH_IOU) -> EvalSummary:
    """Score ``{scene: [target dict, ...]}`` against ``{scene: SceneManifest}``."""
    missing = sorted(set(manifests) - set(detections))
    extra = sorted(set(detections) - set(manifests))
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"no detections for: {', '.join(missing)}")
        if extra:
            parts.append(f"no manifest for: {', '.join(extra)}")
        raise SceneMismatchError("; ".join(parts))
    summary = EvalSummary()
    tables = {a: defaultdict(lambda: defaultdict(int)) for a in ATTRIBUTES}
    for scene in sorted(manifests):
        truth = manifests[scene].targets
        found = detections[scene]
        summary.n_targets += len(truth)
        summary.n_detections += len(found)
        boxes = [BoundingBox.from_dict(d["box"]) for d in found]
        for i, j in match_boxes(boxes, [b for _, b in truth], threshold):
            summary.n_matched += 1
            spec = truth[j][0]
            for attr in ATTRIBUTES:
                expected, got = getattr(spec, attr), found[i][attr]
                summary.correct[attr] += expected == got
                tables[attr][expected][got] += 1
    summary.confusion = {
        a: {t: dict(sorted(row.items())) for t, row in sorted(tables[a].items())} for a in ATTRIBUTES
    }
    return summary


def load_detections(directory) -> dict:
    """``{scene: targets}`` from the per-scene JSON files written by ``detect``."""
    out = {}
    for path in sorted(Path(directory).glob("*.json")):
        doc = json.loads(path.read_text(encoding="utf-8"))
        if not isinstance(doc, dict) or "scene" not in doc or "targets" not in doc:
            continue
        out[doc["scene"]] = doc["targets"]
    return out

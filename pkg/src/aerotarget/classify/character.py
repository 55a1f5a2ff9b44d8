"""Rotation-bank template matching for alphanumeric masks."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_is_fitted

from ..synthgen.glyphs import render_glyph
from ..taxonomy import CHARACTERS
from .base import NORMALIZED_SIZE, MaskClassifier, check_masks, normalize_mask, softmax

AGREEMENT_SCORES = ("iou", "dice", "pixel")
TEMPLATE_HEIGHT = 48  # glyph height (px) used when rendering the bank


def build_character_bank(rotation_step: float = 10.0, height: int = TEMPLATE_HEIGHT):
    """Rendered glyph masks for every character at every bank rotation."""
    if not 0 < rotation_step <= 360:
        raise ValueError("rotation_step must lie in (0, 360]")
    angles = np.arange(0.0, 360.0, rotation_step)
    masks, labels = [], []
    for ch in CHARACTERS:
        for a in angles:
            masks.append(render_glyph(ch, height, float(a)))
            labels.append(ch)
    return masks, labels


def agreement(templates: np.ndarray, query: np.ndarray, score: str = "iou") -> np.ndarray:
    """Agreement of one flattened query with each flattened template, in [0, 1]."""
    t = templates.astype(np.float32)
    q = query.astype(np.float32)
    inter = t @ q
    t_area = t.sum(axis=1)
    q_area = q.sum()
    if score == "iou":
        return inter / np.maximum(t_area + q_area - inter, 1.0)
    if score == "dice":
        return 2.0 * inter / np.maximum(t_area + q_area, 1.0)
    if score == "pixel":
        return (t.shape[1] - t_area - q_area + 2.0 * inter) / t.shape[1]
    raise ValueError(f"unknown agreement score {score!r}")


class TemplateCharacterClassifier(MaskClassifier):
    """Nearest-template character classifier.

    Every training mask is normalized to a 32x32 template. The score of a
    class is its best template agreement with the normalized query, and the
    distribution is a softmax of the scores at ``temperature``.
    """

    def __init__(self, temperature: float = 0.05, score: str = "iou", size: int = NORMALIZED_SIZE):
        self.temperature = temperature
        self.score = score
        self.size = size

    def fit(self, X, y):
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.score not in AGREEMENT_SCORES:
            raise ValueError(f"score must be one of {AGREEMENT_SCORES}")
        masks = check_masks(X)
        y = np.asarray(y)
        if y.shape != (len(masks),):
            raise ValueError("need one label per mask")
        present = set(y.tolist())
        order = [c for c in CHARACTERS if c in present] + sorted(present - set(CHARACTERS))
        self.classes_ = np.array(order)
        self.templates_ = np.stack([normalize_mask(m, self.size) for m in masks])
        index = {c: i for i, c in enumerate(order)}
        self.template_class_ = np.array([index[c] for c in y.tolist()])
        return self

    @classmethod
    def from_bank(cls, rotation_step: float = 10.0, **params) -> TemplateCharacterClassifier:
        return cls(**params).fit(*build_character_bank(rotation_step))

    def class_scores(self, X) -> np.ndarray:
        check_is_fitted(self, "templates_")
        masks = check_masks(X)
        flat = self.templates_.reshape(len(self.templates_), -1)
        out = np.full((len(masks), len(self.classes_)), -np.inf)
        for i, m in enumerate(masks):
            s = agreement(flat, normalize_mask(m, self.size).ravel(), self.score)
            np.maximum.at(out[i], self.template_class_, s)
        return out

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.class_scores(X), self.temperature)

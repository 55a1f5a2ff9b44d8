"""Shared classifier plumbing: distributions, mask conditioning, the model interface."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from ..validation import check_mask

NORMALIZED_SIZE = 32


@dataclass(frozen=True)
class ClassDistribution:
    """Probabilities over an ordered label set."""

    labels: tuple[str, ...]
    probabilities: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=np.float64)
        if probs.shape != (len(self.labels),):
            raise ValueError("need exactly one probability per label")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)) or abs(probs.sum() - 1.0) > 1e-6:
            raise ValueError("probabilities must be non-negative and sum to 1")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "probabilities", probs)

    @property
    def top_index(self) -> int:
        # argmax returns the first maximum, i.e. the lowest label index
        return int(np.argmax(self.probabilities))

    @property
    def label(self) -> str:
        return self.labels[self.top_index]

    @property
    def confidence(self) -> float:
        return float(self.probabilities[self.top_index])

    def as_dict(self) -> dict[str, float]:
        return {k: float(p) for k, p in zip(self.labels, self.probabilities)}


def softmax(scores, temperature: float) -> np.ndarray:
    z = np.asarray(scores, dtype=np.float64) / temperature
    z = np.exp(z - z.max(axis=-1, keepdims=True))
    return z / z.sum(axis=-1, keepdims=True)


def _foreground_box(mask: np.ndarray):
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    return rows[0], rows[-1] + 1, cols[0], cols[-1] + 1


def normalize_mask(mask, size: int = NORMALIZED_SIZE) -> np.ndarray:
    """Crop to the foreground, pad to a centred square and resample (nearest)."""
    mask = check_mask(mask, allow_empty=False)
    r0, r1, c0, c1 = _foreground_box(mask)
    tight = mask[r0:r1, c0:c1]
    h, w = tight.shape
    side = max(h, w)
    square = np.zeros((side, side), dtype=bool)
    top, left = (side - h) // 2, (side - w) // 2
    square[top : top + h, left : left + w] = tight
    idx = ((np.arange(size) + 0.5) * side / size).astype(np.int64)
    return square[np.ix_(idx, idx)]


def superimpose(char_mask, other_mask) -> np.ndarray:
    """Pixel-wise OR of two equally sized masks."""
    a = check_mask(char_mask, name="char_mask")
    b = check_mask(other_mask, name="other_mask")
    if a.shape != b.shape:
        raise ValueError(f"mask shapes differ: {a.shape} vs {b.shape}")
    return a | b


class MaskClassifier(ClassifierMixin, BaseEstimator):
    """Interface for models mapping a binary mask to a class distribution.

    ``X`` is a sequence of 2-D masks of arbitrary size. Subclasses
    implement ``fit`` and ``predict_proba``; ``classes_`` lists labels in
    the column order of ``predict_proba``.
    """

    def predict_proba(self, X) -> np.ndarray:
        raise NotImplementedError

    def predict(self, X) -> np.ndarray:
        proba = self.predict_proba(X)
        return np.asarray(self.classes_)[np.argmax(proba, axis=1)]

    def predict_distribution(self, mask) -> ClassDistribution:
        check_is_fitted(self, "classes_")
        return ClassDistribution(tuple(self.classes_), self.predict_proba([mask])[0])


def check_masks(X) -> list[np.ndarray]:
    if isinstance(X, np.ndarray) and X.ndim == 2:
        X = [X]
    masks = [check_mask(m, allow_empty=False) for m in X]
    if not masks:
        raise ValueError("need at least one mask")
    return masks

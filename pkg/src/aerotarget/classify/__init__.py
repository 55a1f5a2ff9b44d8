"""Character, shape and color classification of segmented targets."""

from .base import ClassDistribution, MaskClassifier, normalize_mask, superimpose
from .character import TemplateCharacterClassifier, build_character_bank
from .color import classify_color, nearest_color
from .shape import CentroidShapeClassifier, build_shape_samples, shape_features
from .target import TargetReport, classify_target

__all__ = [
    "CentroidShapeClassifier",
    "ClassDistribution",
    "MaskClassifier",
    "TargetReport",
    "TemplateCharacterClassifier",
    "build_character_bank",
    "build_shape_samples",
    "classify_color",
    "classify_target",
    "nearest_color",
    "normalize_mask",
    "shape_features",
    "superimpose",
]

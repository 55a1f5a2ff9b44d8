"""Deterministic synthetic targets, scenes and labelled datasets."""

from .dataset import DatasetConfig, DatasetIndex, build_scene, generate_dataset, load_manifests
from .glyphs import glyph_membership
from .scene import (
    BACKGROUND_KINDS,
    Background,
    RenderedTarget,
    SceneManifest,
    TargetSpec,
    generate_scene,
    render_target,
)
from .shapes import character_placement, render_mask

__all__ = [
    "BACKGROUND_KINDS",
    "Background",
    "DatasetConfig",
    "DatasetIndex",
    "RenderedTarget",
    "SceneManifest",
    "TargetSpec",
    "build_scene",
    "character_placement",
    "generate_dataset",
    "generate_scene",
    "glyph_membership",
    "load_manifests",
    "render_mask",
    "render_target",
]

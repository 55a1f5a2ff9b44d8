"""Pipeline configuration loaded from a TOML document.

Every table mirrors one stage config::

    seed = 0

    [roi]
    quantize_k = 16

    [segmentation]
    variance_target = 0.99
    merge_distance = false     # false disables an optional refinement

    [fpr]
    max_regions = 2

    [classify]
    assets = "path/to/assets.bin"
    shape_selection = "population"

    [debug]
    masks = false

    [gen]                      # dataset settings for the ``gen`` command
    n_scenes = 200

Unknown tables or keys are rejected. TOML has no null, so optional numeric
settings take ``false`` to mean "off".
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .classify.target import SELECTION_RULES
from .fpr import FprConfig
from .roi import RoiConfig
from .segmentation import SegmentationConfig
from .synthgen import DatasetConfig

ENV_VAR = "AEROTARGET_CONFIG"


class ConfigError(ValueError):
    """Invalid or unreadable configuration."""


@dataclass(frozen=True)
class ClassifyConfig:
    assets: str | None = None
    shape_selection: str = "population"

    def __post_init__(self):
        if self.shape_selection not in SELECTION_RULES:
            raise ValueError(f"shape_selection must be one of {SELECTION_RULES}")


@dataclass(frozen=True)
class DebugConfig:
    masks: bool = False


@dataclass(frozen=True)
class PipelineConfig:
    roi: RoiConfig = field(default_factory=RoiConfig)
    segmentation: SegmentationConfig = field(default_factory=SegmentationConfig)
    fpr: FprConfig = field(default_factory=FprConfig)
    classify: ClassifyConfig = field(default_factory=ClassifyConfig)
    debug: DebugConfig = field(default_factory=DebugConfig)
    gen: DatasetConfig = field(default_factory=DatasetConfig)
    seed: int = 0

    @classmethod
    def from_dict(cls, data: dict, base_dir=None) -> PipelineConfig:
        sections = {f.name: f for f in fields(cls)}
        unknown = sorted(set(data) - set(sections))
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
        kwargs = {}
        try:
            for name, value in data.items():
                if name == "seed":
                    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                        raise ConfigError("seed must be a non-negative integer")
                    kwargs[name] = value
                    continue
                if not isinstance(value, dict):
                    raise ConfigError(f"[{name}] must be a table")
                kwargs[name] = _section(cls._section_types()[name], value, name)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc
        cfg = cls(**kwargs)
        assets = cfg.classify.assets
        if assets is not None and base_dir is not None and not Path(assets).is_absolute():
            cfg = cfg.replace_assets(str(Path(base_dir) / assets))
        return cfg

    @staticmethod
    def _section_types() -> dict:
        return {
            "roi": RoiConfig,
            "segmentation": SegmentationConfig,
            "fpr": FprConfig,
            "classify": ClassifyConfig,
            "debug": DebugConfig,
            "gen": DatasetConfig,
        }

    def replace_assets(self, path: str | None) -> PipelineConfig:
        return replace(self, classify=replace(self.classify, assets=path))


def _section(kind, values: dict, name: str):
    allowed = {f.name: f for f in fields(kind)}
    unknown = sorted(set(values) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown keys in [{name}]: {', '.join(unknown)}")
    clean = {}
    for key, value in values.items():
        optional = "None" in str(allowed[key].type)
        if value is False and optional:
            value = None
        elif isinstance(value, list):
            value = tuple(value)
        clean[key] = value
    return kind(**clean)


def load_config(path=None) -> PipelineConfig:
    """Read ``path``; fall back to ``$AEROTARGET_CONFIG``, then the defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return PipelineConfig()
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    return PipelineConfig.from_dict(data, base_dir=path.parent)

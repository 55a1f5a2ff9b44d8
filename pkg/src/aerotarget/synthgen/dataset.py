"""Seeded dataset generation: ``scenes/<id>.png``, ``scenes/<id>.json``, ``index.json``."""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from ..taxonomy import CHARACTERS, COLOR_NAMES, SHAPES
from .scene import (
    BACKGROUND_KINDS,
    BACKGROUND_PALETTE,
    DEFAULT_BLUR_RADIUS,
    DEFAULT_NOISE_SIGMA,
    Background,
    SceneManifest,
    TargetSpec,
    generate_scene,
    texture_partner,
)
from .shapes import rotated_extent

INDEX_VERSION = 1


@dataclass(frozen=True)
class DatasetConfig:
    n_scenes: int = 200
    width: int = 1280
    height: int = 960
    targets_per_scene: int = 1
    size_range: tuple[int, int] = (40, 120)
    coverage: bool = True
    noise_sigma: float = DEFAULT_NOISE_SIGMA
    blur_radius: float = DEFAULT_BLUR_RADIUS
    backgrounds: tuple[str, ...] = BACKGROUND_KINDS
    texture_contrast: int = 16
    seed: int = 0

    def __post_init__(self):
        if self.n_scenes < 0 or self.targets_per_scene < 0:
            raise ValueError("counts must be non-negative")
        lo, hi = self.size_range
        if not 16 <= lo <= hi:
            raise ValueError(f"invalid size_range {self.size_range}")
        if not self.backgrounds or any(b not in BACKGROUND_KINDS for b in self.backgrounds):
            raise ValueError(f"backgrounds must be drawn from {BACKGROUND_KINDS}")
        object.__setattr__(self, "size_range", (int(lo), int(hi)))
        object.__setattr__(self, "backgrounds", tuple(self.backgrounds))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["size_range"] = list(self.size_range)
        d["backgrounds"] = list(self.backgrounds)
        return d


@dataclass
class _Labels:
    shape: str
    character: str
    shape_color: str
    character_color: str


def _class_plan(cfg: DatasetConfig) -> list[_Labels]:
    """Labels for every target in the dataset.

    With ``coverage`` each class list is walked in a seeded random order, so
    any class appears once there are at least as many targets as classes.
    """
    total = cfg.n_scenes * cfg.targets_per_scene
    rng = np.random.default_rng([cfg.seed, 0xC0DE])
    plan = []
    if cfg.coverage:
        shapes = rng.permutation(len(SHAPES))
        chars = rng.permutation(len(CHARACTERS))
        scol = rng.permutation(len(COLOR_NAMES))
        ccol = rng.permutation(len(COLOR_NAMES))
        for t in range(total):
            s_c = COLOR_NAMES[scol[t % len(scol)]]
            c_c = COLOR_NAMES[ccol[(t + t // len(ccol)) % len(ccol)]]
            if c_c == s_c:
                c_c = COLOR_NAMES[(COLOR_NAMES.index(c_c) + 1) % len(COLOR_NAMES)]
            plan.append(
                _Labels(SHAPES[shapes[t % len(shapes)]], CHARACTERS[chars[t % len(chars)]], s_c, c_c)
            )
    else:
        for _ in range(total):
            s_c, c_c = rng.choice(len(COLOR_NAMES), size=2, replace=False)
            plan.append(
                _Labels(
                    SHAPES[rng.integers(len(SHAPES))],
                    CHARACTERS[rng.integers(len(CHARACTERS))],
                    COLOR_NAMES[s_c],
                    COLOR_NAMES[c_c],
                )
            )
    return plan


def _scene_id(i: int) -> str:
    return f"scene_{i:04d}"


def _place(labels, rng, cfg, placed):
    lo, hi = cfg.size_range
    for _ in range(200):
        size = int(rng.integers(lo, hi + 1))
        rotation = float(np.round(rng.uniform(0.0, 360.0), 2))
        x0, y0, x1, y1 = rotated_extent(labels.shape, size, rotation)
        margin = 0.25 * size + 4
        cx = float(np.round(rng.uniform(margin - x0, cfg.width - margin - x1), 2))
        cy = float(np.round(rng.uniform(margin - y0, cfg.height - margin - y1), 2))
        box = (cx + x0 - margin, cy + y0 - margin, cx + x1 + margin, cy + y1 + margin)
        if any(box[0] < b[2] and b[0] < box[2] and box[1] < b[3] and b[1] < box[3] for b in placed):
            continue
        placed.append(box)
        return TargetSpec(
            shape=labels.shape,
            shape_color=labels.shape_color,
            character=labels.character,
            character_color=labels.character_color,
            rotation=rotation,
            size=size,
            position=(cx, cy),
        )
    raise ValueError("could not place targets without overlap; lower targets_per_scene")


def _background(rng, cfg) -> Background:
    kind = cfg.backgrounds[int(rng.integers(len(cfg.backgrounds)))]
    base = np.array(BACKGROUND_PALETTE[int(rng.integers(len(BACKGROUND_PALETTE)))])
    shift = cfg.texture_contrast * (1 if rng.random() < 0.5 else -1)
    second = texture_partner(base, shift)
    scale = float(rng.integers(12, 40))
    if kind == "flat":
        return Background("flat", (tuple(int(c) for c in base),), scale)
    return Background(kind, (tuple(int(c) for c in base), second), scale)


def build_scene(cfg: DatasetConfig, index: int, plan=None):
    """Image and manifest of scene ``index``; a pure function of ``(cfg, index)``."""
    if plan is None:
        plan = _class_plan(cfg)
    rng = np.random.default_rng([cfg.seed, index])
    bg = _background(rng, cfg)
    placed: list = []
    k = cfg.targets_per_scene
    specs = [_place(labels, rng, cfg, placed) for labels in plan[index * k : (index + 1) * k]]
    scene_seed = int(rng.integers(0, 2**31 - 1))
    return generate_scene(
        specs,
        bg,
        cfg.noise_sigma,
        cfg.blur_radius,
        scene_seed,
        width=cfg.width,
        height=cfg.height,
        scene_id=_scene_id(index),
    )


def _atomic_write_bytes(path: Path, data: bytes) -> None:
    tmp = path.with_name(f".{path.name}.tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _write_scene(args) -> str:
    cfg, index, plan, scenes_dir = args
    image, manifest = build_scene(cfg, index, plan)
    png = scenes_dir / f"{manifest.scene_id}.png"
    tmp = png.with_name(f".{png.name}.tmp")
    Image.fromarray(image).save(tmp, format="PNG", compress_level=1)
    os.replace(tmp, png)
    _atomic_write_bytes(scenes_dir / f"{manifest.scene_id}.json", manifest.to_json().encode("utf-8"))
    return manifest.scene_id


@dataclass
class DatasetIndex:
    config: dict
    scenes: list[str] = field(default_factory=list)
    version: int = INDEX_VERSION

    def to_json(self) -> str:
        d = {"version": self.version, "count": len(self.scenes), "config": self.config, "scenes": self.scenes}
        return json.dumps(d, indent=2, sort_keys=True) + "\n"

    @classmethod
    def load(cls, path) -> DatasetIndex:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
        if d.get("version") != INDEX_VERSION:
            raise ValueError(f"unsupported index version {d.get('version')!r}")
        if d["count"] != len(d["scenes"]):
            raise ValueError("index count does not match its scene list")
        return cls(config=d["config"], scenes=list(d["scenes"]), version=d["version"])


def generate_dataset(cfg: DatasetConfig, out_dir, jobs: int = 1) -> DatasetIndex:
    """Write ``cfg.n_scenes`` scenes plus manifests and an index under ``out_dir``."""
    out = Path(out_dir)
    scenes_dir = out / "scenes"
    try:
        scenes_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create dataset directory {out}: {exc}") from exc
    if not os.access(scenes_dir, os.W_OK):
        raise OSError(f"dataset directory {scenes_dir} is not writable")
    plan = _class_plan(cfg)
    work = [(cfg, i, plan, scenes_dir) for i in range(cfg.n_scenes)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            ids = list(pool.map(_write_scene, work))
    else:
        ids = [_write_scene(w) for w in work]
    index = DatasetIndex(config=cfg.to_dict(), scenes=ids)
    _atomic_write_bytes(out / "index.json", index.to_json().encode("utf-8"))
    return index


def load_manifests(root) -> dict[str, SceneManifest]:
    """Manifests keyed by scene id from a dataset root or its ``scenes`` directory."""
    root = Path(root)
    scenes = root / "scenes" if (root / "scenes").is_dir() else root
    out = {}
    for path in sorted(scenes.glob("*.json")):
        manifest = SceneManifest.from_json(path.read_text(encoding="utf-8"))
        out[manifest.scene_id] = manifest
    return out

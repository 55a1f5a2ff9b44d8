"""Target rendering and scene composition with ground truth."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import ndimage

from ..imgcore import BoundingBox
from ..taxonomy import CHARACTERS, COLORS, SHAPES, check_label
from .glyphs import glyph_membership
from .shapes import character_placement, rasterize, rotated_extent, to_canonical

BACKGROUND_KINDS = ("flat", "noise", "checker")

# Ground tones (grass, asphalt, soil) share an HSV value of 64/255, which
# sits at least 64 levels away from the value of every reference color.
# Two-tone textures vary only in chroma (see ``texture_partner``).
GROUND_VALUE = 64
BACKGROUND_PALETTE = (
    (40, 64, 30),
    (50, 64, 40),
    (60, 60, 64),
    (64, 52, 38),
    (44, 64, 52),
    (64, 62, 48),
)


def texture_partner(color, contrast: int) -> tuple[int, int, int]:
    """Second texture tone: non-maximal channels shifted, value kept."""
    c = np.array(color, dtype=np.int64)
    top = int(c.max())
    lower = c < top
    c[lower] = np.clip(c[lower] + contrast, 0, top - 1)
    return tuple(int(v) for v in c)


DEFAULT_NOISE_SIGMA = 6.0  # 8-bit levels
DEFAULT_BLUR_RADIUS = 1.0  # Gaussian sigma in pixels


@dataclass(frozen=True)
class TargetSpec:
    shape: str
    shape_color: str
    character: str
    character_color: str
    rotation: float
    size: int
    position: tuple[float, float]

    def __post_init__(self):
        check_label(self.shape, SHAPES, "shape")
        check_label(self.character, CHARACTERS, "character")
        check_label(self.shape_color, COLORS, "color")
        check_label(self.character_color, COLORS, "color")
        if self.shape_color == self.character_color:
            raise ValueError("shape and character colors must differ")
        if self.size < 16:
            raise ValueError(f"target size must be >= 16 pixels, got {self.size}")
        object.__setattr__(self, "position", (float(self.position[0]), float(self.position[1])))
        object.__setattr__(self, "rotation", float(self.rotation))
        object.__setattr__(self, "size", int(self.size))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["position"] = list(self.position)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> TargetSpec:
        return cls(**{**d, "position": tuple(d["position"])})


@dataclass
class RenderedTarget:
    """A target rendered onto the frame window starting at ``origin``."""

    rgb: np.ndarray
    shape_mask: np.ndarray
    char_mask: np.ndarray
    origin: tuple[int, int]

    @property
    def alpha(self) -> np.ndarray:
        return self.shape_mask | self.char_mask

    def box(self) -> BoundingBox:
        rows = np.flatnonzero(self.alpha.any(axis=1))
        cols = np.flatnonzero(self.alpha.any(axis=0))
        x0, y0 = self.origin
        return BoundingBox(x0 + cols[0], y0 + rows[0], x0 + cols[-1] + 1, y0 + rows[-1] + 1)


def _window(spec: TargetSpec) -> tuple[int, int, int, int]:
    x0, y0, x1, y1 = rotated_extent(spec.shape, spec.size, spec.rotation)
    cx, cy = spec.position
    left = int(math.floor(cx + x0)) - 1
    top = int(math.floor(cy + y0)) - 1
    return left, top, int(math.ceil(cx + x1)) + 1 - left + 1, int(math.ceil(cy + y1)) + 1 - top + 1


def render_target(spec: TargetSpec) -> RenderedTarget:
    """Render shape and glyph; the glyph is cut out of the shape mask."""
    left, top, w, h = _window(spec)
    silhouette = rasterize(spec.shape, spec.size, spec.rotation, spec.position, left, top, w, h)
    cu, cv, scale = character_placement(spec.shape)
    ys, xs = np.mgrid[top : top + h, left : left + w].astype(np.float64) + 0.5
    u, v = to_canonical(xs, ys, spec.position, spec.size, spec.rotation)
    glyph = glyph_membership(spec.character, (u - cu) / scale, (v - cv) / scale).reshape(h, w)
    if not glyph.any():
        raise ValueError(f"glyph {spec.character!r} vanished at size {spec.size}")
    if np.any(glyph & ~ndimage.binary_erosion(silhouette)):
        raise ValueError(f"glyph {spec.character!r} does not fit inside the {spec.shape}")
    shape_mask = silhouette & ~glyph
    rgb = np.zeros((h, w, 3), dtype=np.uint8)
    rgb[shape_mask] = COLORS[spec.shape_color]
    rgb[glyph] = COLORS[spec.character_color]
    return RenderedTarget(rgb=rgb, shape_mask=shape_mask, char_mask=glyph, origin=(left, top))


@dataclass(frozen=True)
class Background:
    kind: str = "flat"
    colors: tuple[tuple[int, int, int], ...] = (BACKGROUND_PALETTE[0],)
    scale: float = 16.0

    def __post_init__(self):
        if self.kind not in BACKGROUND_KINDS:
            raise ValueError(f"unknown background kind {self.kind!r}")
        colors = tuple(tuple(int(c) for c in col) for col in self.colors)
        if not colors or any(len(c) != 3 for c in colors):
            raise ValueError("background colors must be RGB triples")
        if self.kind != "flat" and len(colors) < 2:
            raise ValueError(f"{self.kind} background needs two colors")
        object.__setattr__(self, "colors", colors)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "colors": [list(c) for c in self.colors], "scale": self.scale}

    @classmethod
    def from_dict(cls, d: dict) -> Background:
        return cls(kind=d["kind"], colors=tuple(tuple(c) for c in d["colors"]), scale=d["scale"])

    def render(self, width: int, height: int, rng: np.random.Generator) -> np.ndarray:
        img = np.empty((height, width, 3), dtype=np.float64)
        img[:] = self.colors[0]
        if self.kind == "checker":
            cell = max(int(self.scale), 1)
            ys, xs = np.mgrid[0:height, 0:width]
            odd = ((ys // cell) + (xs // cell)) % 2 == 1
            img[odd] = self.colors[1]
        elif self.kind == "noise":
            step = 4
            coarse = rng.normal(size=(height // step + 2, width // step + 2))
            coarse = ndimage.gaussian_filter(coarse, self.scale / step, mode="wrap")
            field_ = ndimage.zoom(coarse, step, order=1)[:height, :width]
            img[field_ > 0] = self.colors[1]
        return img


@dataclass
class SceneManifest:
    scene_id: str
    image: str
    width: int
    height: int
    background: Background
    noise_sigma: float
    blur_radius: float
    seed: int
    targets: list[tuple[TargetSpec, BoundingBox]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "scene_id": self.scene_id,
            "image": self.image,
            "width": self.width,
            "height": self.height,
            "background": self.background.to_dict(),
            "noise_sigma": self.noise_sigma,
            "blur_radius": self.blur_radius,
            "seed": self.seed,
            "targets": [{"spec": s.to_dict(), "box": b.to_dict()} for s, b in self.targets],
        }

    @classmethod
    def from_dict(cls, d: dict) -> SceneManifest:
        return cls(
            scene_id=d["scene_id"],
            image=d["image"],
            width=d["width"],
            height=d["height"],
            background=Background.from_dict(d["background"]),
            noise_sigma=d["noise_sigma"],
            blur_radius=d["blur_radius"],
            seed=d["seed"],
            targets=[(TargetSpec.from_dict(t["spec"]), BoundingBox.from_dict(t["box"])) for t in d["targets"]],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> SceneManifest:
        return cls.from_dict(json.loads(text))


def generate_scene(
    specs,
    bg: Background,
    noise_sigma: float = DEFAULT_NOISE_SIGMA,
    blur_radius: float = DEFAULT_BLUR_RADIUS,
    seed: int = 0,
    *,
    width: int = 1280,
    height: int = 960,
    scene_id: str = "scene",
) -> tuple[np.ndarray, SceneManifest]:
    """Composite ``specs`` over ``bg``, then blur and add Gaussian pixel noise."""
    rng = np.random.default_rng(seed)
    img = bg.render(width, height, rng)
    rendered = [render_target(s) for s in specs]
    boxes = [r.box() for r in rendered]
    for i, (r, a) in enumerate(zip(rendered, boxes)):
        x0, y0 = r.origin
        h, w = r.alpha.shape
        if x0 < 0 or y0 < 0 or x0 + w > width or y0 + h > height:
            raise ValueError(f"target {i} extends outside the {width}x{height} frame")
        for b in boxes[:i]:
            if a.intersection_area(b):
                raise ValueError("target footprints overlap")
    for r in rendered:
        x0, y0 = r.origin
        h, w = r.alpha.shape
        view = img[y0 : y0 + h, x0 : x0 + w]
        view[r.alpha] = r.rgb[r.alpha]
    if blur_radius > 0:
        img = ndimage.gaussian_filter(img, sigma=(blur_radius, blur_radius, 0))
    if noise_sigma > 0:
        img = img + rng.normal(0.0, noise_sigma, size=img.shape)
    image = np.clip(np.rint(img), 0, 255).astype(np.uint8)
    manifest = SceneManifest(
        scene_id=scene_id,
        image=f"{scene_id}.png",
        width=width,
        height=height,
        background=bg,
        noise_sigma=float(noise_sigma),
        blur_radius=float(blur_radius),
        seed=int(seed),
        targets=list(zip(specs, boxes)),
    )
    return image, manifest

"""Versioned binary storage for the fitted classifier pair.

Layout: 8-byte magic, little-endian ``uint16`` format version, ``uint32``
generation seed, ``uint32`` header length, a UTF-8 JSON header with sorted
keys, then the raw array payloads back to back. The header lists every
array with its dtype, shape and byte offset into the payload. Nothing in
the file depends on the clock or the platform, so rebuilding with the same
seed gives the same bytes.
"""

from __future__ import annotations

import json
import os
import struct
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .classify import CentroidShapeClassifier, TemplateCharacterClassifier, build_shape_samples
from .classify.character import build_character_bank

MAGIC = b"AEROTGT\x00"
FORMAT_VERSION = 1
DEFAULT_ASSET = "default.bin"
_PREFIX = struct.Struct("<8sHII")


class AssetError(ValueError):
    """Raised for unreadable, corrupt or incompatible asset files."""


@dataclass
class ClassifierAssets:
    char_model: TemplateCharacterClassifier
    shape_model: CentroidShapeClassifier
    seed: int
    rotation_step: float


def build_assets(seed: int = 0, rotation_step: float = 10.0, shape_samples_per_class: int = 40) -> ClassifierAssets:
    """Fit both baseline classifiers from freshly rendered masks."""
    char_model = TemplateCharacterClassifier().fit(*build_character_bank(rotation_step))
    shape_model = CentroidShapeClassifier().fit(*build_shape_samples(seed, shape_samples_per_class))
    return ClassifierAssets(char_model, shape_model, int(seed), float(rotation_step))


def _arrays(assets: ClassifierAssets) -> dict[str, np.ndarray]:
    cm, sm = assets.char_model, assets.shape_model
    return {
        "char_templates": np.packbits(cm.templates_.astype(bool), axis=-1),
        "char_template_class": cm.template_class_.astype("<i4"),
        "shape_centroids": sm.centroids_.astype("<f8"),
        "shape_scale": sm.scale_.astype("<f8"),
    }


def encode_assets(assets: ClassifierAssets) -> bytes:
    cm, sm = assets.char_model, assets.shape_model
    arrays = _arrays(assets)
    table, offset = {}, 0
    for name in sorted(arrays):
        arr = np.ascontiguousarray(arrays[name])
        table[name] = {"dtype": arr.dtype.str, "shape": list(arr.shape), "offset": offset}
        offset += arr.nbytes
    header = {
        "arrays": table,
        "character": {
            "classes": cm.classes_.tolist(),
            "rotation_step": assets.rotation_step,
            "score": cm.score,
            "size": int(cm.size),
            "temperature": float(cm.temperature),
        },
        "shape": {"classes": sm.classes_.tolist(), "temperature": float(sm.temperature)},
    }
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    payload = b"".join(np.ascontiguousarray(arrays[n]).tobytes() for n in sorted(arrays))
    return _PREFIX.pack(MAGIC, FORMAT_VERSION, assets.seed, len(head)) + head + payload


def decode_assets(data: bytes) -> ClassifierAssets:
    if len(data) < _PREFIX.size:
        raise AssetError("asset file is truncated")
    magic, version, seed, head_len = _PREFIX.unpack_from(data)
    if magic != MAGIC:
        raise AssetError("not a classifier asset file")
    if version != FORMAT_VERSION:
        raise AssetError(f"asset format version {version} is not supported (expected {FORMAT_VERSION})")
    start = _PREFIX.size
    try:
        header = json.loads(data[start : start + head_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise AssetError(f"corrupt asset header: {exc}") from exc
    body = memoryview(data)[start + head_len :]
    arrays = {}
    for name, meta in header["arrays"].items():
        dtype = np.dtype(meta["dtype"])
        count = int(np.prod(meta["shape"], dtype=np.int64))
        end = meta["offset"] + count * dtype.itemsize
        if end > len(body):
            raise AssetError(f"asset array {name!r} is truncated")
        arrays[name] = np.frombuffer(body[meta["offset"] : end], dtype=dtype).reshape(meta["shape"]).copy()

    ch = header["character"]
    cm = TemplateCharacterClassifier(temperature=ch["temperature"], score=ch["score"], size=ch["size"])
    cm.classes_ = np.array(ch["classes"])
    size = ch["size"]
    cm.templates_ = np.unpackbits(arrays["char_templates"], axis=-1, count=size).astype(bool)
    cm.template_class_ = arrays["char_template_class"].astype(np.int64)

    sh = header["shape"]
    sm = CentroidShapeClassifier(temperature=sh["temperature"])
    sm.classes_ = np.array(sh["classes"])
    sm.centroids_ = arrays["shape_centroids"]
    sm.scale_ = arrays["shape_scale"]
    return ClassifierAssets(cm, sm, int(seed), float(ch["rotation_step"]))


def save_assets(assets: ClassifierAssets, path) -> None:
    """Write atomically (temp file, then rename)."""
    path = Path(path)
    tmp = path.with_name(f".{path.name}.tmp")
    tmp.write_bytes(encode_assets(assets))
    os.replace(tmp, path)


def load_assets(path=None) -> ClassifierAssets:
    """Load ``path``, or the bundled default asset when ``path`` is None."""
    if path is None:
        data = resources.files("aerotarget").joinpath("assets").joinpath(DEFAULT_ASSET).read_bytes()
    else:
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise AssetError(f"cannot read asset file {path}: {exc}") from exc
    return decode_assets(data)

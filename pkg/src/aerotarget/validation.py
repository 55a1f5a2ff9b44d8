"""Input validation helpers shared by the estimators and functional API."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array


def check_image(img, *, min_size: int = 1, name: str = "image") -> np.ndarray:
    """Return ``img`` as a C-contiguous ``(H, W, 3)`` uint8 array.

    Raises ``ValueError`` for anything that is not an 8-bit three-channel
    image of at least ``min_size`` pixels per side.
    """
    arr = np.asarray(img)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"{name} must have shape (H, W, 3), got {arr.shape}")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.integer):
            raise ValueError(f"{name} must hold 8-bit integers, got {arr.dtype}")
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError(f"{name} values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    h, w = arr.shape[:2]
    if h < min_size or w < min_size:
        raise ValueError(f"{name} must be at least {min_size}x{min_size}, got {w}x{h}")
    return np.ascontiguousarray(arr)


def check_plane(img, *, name: str = "plane") -> np.ndarray:
    """Validate a float color plane of shape ``(H, W, 3)``."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have shape (H, W, 3), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_gray(img, *, name: str = "grayscale image") -> np.ndarray:
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    return arr


def check_mask(mask, *, allow_empty: bool = True, name: str = "mask") -> np.ndarray:
    """Return ``mask`` as a 2-D boolean array."""
    arr = np.asarray(mask)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.dtype != bool:
        arr = arr != 0
    if not allow_empty and not arr.any():
        raise ValueError(f"{name} has no foreground pixels")
    return arr


def check_features(data, *, min_samples: int = 1, name: str = "data") -> np.ndarray:
    """Validate a finite ``(n, d)`` float feature matrix."""
    if np.asarray(data).size == 0:
        raise ValueError(f"{name} is empty")
    return check_array(
        data,
        dtype=np.float64,
        ensure_min_samples=min_samples,
        input_name=name,
    )

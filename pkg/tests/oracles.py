"""Independent brute-force oracles used to check the optimised code paths.

Nothing in here imports from ``aerotarget``; each function is the naive,
obviously-correct version of something the package does faster.
"""

from __future__ import annotations

import itertools

import numpy as np

NEIGHBOURS_8 = [(dy, dx) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dy, dx) != (0, 0)]


def flood_fill_components(mask) -> list[list[tuple[int, int]]]:
    """8-connected components as lists of (row, col), by explicit stack fill."""
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    seen = np.zeros_like(mask)
    components = []
    for r in range(h):
        for c in range(w):
            if not mask[r, c] or seen[r, c]:
                continue
            stack = [(r, c)]
            seen[r, c] = True
            comp = []
            while stack:
                y, x = stack.pop()
                comp.append((y, x))
                for dy, dx in NEIGHBOURS_8:
                    ny, nx = y + dy, x + dx
                    if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and not seen[ny, nx]:
                        seen[ny, nx] = True
                        stack.append((ny, nx))
            components.append(comp)
    return components


def component_extents(mask) -> list[tuple[int, int, int, int]]:
    """Half-open (x_min, y_min, x_max, y_max) of each 8-connected component."""
    out = []
    for comp in flood_fill_components(mask):
        ys = [p[0] for p in comp]
        xs = [p[1] for p in comp]
        out.append((min(xs), min(ys), max(xs) + 1, max(ys) + 1))
    return sorted(out)


def box_pixel_iou(a, b) -> float:
    """IOU of two half-open boxes by counting integer grid cells."""
    cells_a = {(x, y) for x in range(a[0], a[2]) for y in range(a[1], a[3])}
    cells_b = {(x, y) for x in range(b[0], b[2]) for y in range(b[1], b[3])}
    union = len(cells_a | cells_b)
    return len(cells_a & cells_b) / union if union else 0.0


def naive_median3x3(plane) -> np.ndarray:
    """Per-pixel 3x3 median with clamped borders, one pixel at a time."""
    plane = np.asarray(plane)
    h, w = plane.shape
    out = np.empty_like(plane)
    for r in range(h):
        for c in range(w):
            vals = [
                plane[min(max(r + dy, 0), h - 1), min(max(c + dx, 0), w - 1)]
                for dy in (-1, 0, 1)
                for dx in (-1, 0, 1)
            ]
            out[r, c] = sorted(vals)[4]
    return out


def sort_median(column) -> float:
    vals = sorted(float(v) for v in column)
    n = len(vals)
    mid = n // 2
    return vals[mid] if n % 2 else (vals[mid - 1] + vals[mid]) / 2.0


def best_two_partition(points) -> tuple[float, np.ndarray, np.ndarray]:
    """Exhaustive minimum-inertia split of a small point set into two groups."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    best = (np.inf, None, None)
    for bits in itertools.product((0, 1), repeat=n - 1):
        labels = np.array((0,) + bits)
        if labels.sum() == 0:
            continue
        a, b = pts[labels == 0], pts[labels == 1]
        cost = ((a - a.mean(0)) ** 2).sum() + ((b - b.mean(0)) ** 2).sum()
        if cost < best[0]:
            best = (cost, a.mean(0), b.mean(0))
    return best


def l1_nearest(rgb, table: dict) -> str:
    """Nearest named color by Manhattan distance; first listed wins ties."""
    best_name, best_d = None, None
    for name, ref in table.items():
        d = sum(abs(int(p) - int(q)) for p, q in zip(rgb, ref))
        if best_d is None or d < best_d:
            best_name, best_d = name, d
    return best_name

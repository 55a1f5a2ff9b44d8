"""Closed label sets for characters, shapes and colors."""

from __future__ import annotations

import string

CHARACTERS: tuple[str, ...] = tuple(string.ascii_uppercase + string.digits)

SHAPES: tuple[str, ...] = (
    "square",
    "rectangle",
    "triangle",
    "trapezoid",
    "hexagon",
    "heptagon",
    "octagon",
    "quarter-circle",
    "semi-circle",
    "star",
    "cross",
    "circle",
    "pentagon",
)

# Listing order doubles as the tie-break order for color naming.
COLORS: dict[str, tuple[int, int, int]] = {
    "White": (255, 255, 255),
    "Black": (0, 0, 0),
    "Gray": (128, 128, 128),
    "Red": (255, 0, 0),
    "Blue": (0, 0, 255),
    "Green": (0, 128, 0),
    "Yellow": (255, 255, 0),
    "Purple": (128, 0, 128),
    "Brown": (150, 75, 0),
    "Orange": (255, 165, 0),
}
COLOR_NAMES: tuple[str, ...] = tuple(COLORS)

# Pairs the shape classifier is known to confuse on blurred masks; excluded
# from the clean-mask accuracy count but still reported.
SHAPE_CONFUSION_GROUPS: tuple[frozenset[str], ...] = (
    frozenset({"square", "rectangle"}),
    frozenset({"hexagon", "heptagon", "octagon", "circle"}),
)


def documented_confusion(true: str, predicted: str) -> bool:
    return true != predicted and any(
        true in group and predicted in group for group in SHAPE_CONFUSION_GROUPS
    )


def check_label(label: str, labels, kind: str) -> str:
    if label not in labels:
        raise ValueError(f"unknown {kind} {label!r}")
    return label

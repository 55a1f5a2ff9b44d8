"""Detection and classification of character-on-shape aerial targets."""

__version__ = "0.1.0"

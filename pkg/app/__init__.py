"""Fisher–Rao geometry of beta distributions and histogram classification."""

__version__ = "1.0.0"

"""arcades: object-oriented code rendered as an interactive 3D city."""

__version__ = "0.1.0"

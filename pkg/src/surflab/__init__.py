"""Type problem toolkit for bounded-geometry surfaces via their pants/hexagon graphs."""

__version__ = "0.1.0"

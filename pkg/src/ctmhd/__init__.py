"""Unstaggered constrained-transport finite-volume solver for 3D ideal MHD."""

__version__ = "0.1.0"

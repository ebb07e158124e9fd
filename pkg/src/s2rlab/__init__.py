"""Desk-scale sim-to-real transfer laboratory on a planar arm."""

__version__ = "0.1.0"

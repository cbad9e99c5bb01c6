"""Bivariate bicycle codes on neutral-atom grids: layout, gates, scheduling."""

__version__ = "0.1.0"

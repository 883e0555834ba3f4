"""Exact and numerical experiments on planar polynomial vector fields."""

__version__ = "0.1.0"

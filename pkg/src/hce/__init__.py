"""Exact-arithmetic engine for Harish-Chandra pairs and equivariant functors."""

__version__ = "0.1.0"

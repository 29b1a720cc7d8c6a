"""Exact computations with minimal complexes graded by geometric lattices."""

__version__ = "0.1.0"

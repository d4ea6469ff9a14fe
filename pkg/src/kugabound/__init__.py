"""Exact invariants, slope inequalities and genus-bound certificates for
semi-stable families of curves."""

__version__ = "0.1.0"

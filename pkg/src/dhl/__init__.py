"""Numerical verification engine for Dirac-harmonic maps with the canonical Spin^c structure."""

__version__ = "0.1.0"

"""Desk-scale density-matrix simulator of liquid-state NMR quantum computing."""

__version__ = "0.1.0"

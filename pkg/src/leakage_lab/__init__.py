"""Maximal-leakage privacy-utility analysis for multi-user guessing systems."""

__version__ = "0.1.0"

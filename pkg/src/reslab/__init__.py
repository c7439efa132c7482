"""Spectral machinery for time-periodic waves on the Einstein cylinder."""

__version__ = "0.1.0"

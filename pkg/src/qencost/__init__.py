"""Encoding cost estimates and small-scale circuit simulation."""

__version__ = "0.1.0"

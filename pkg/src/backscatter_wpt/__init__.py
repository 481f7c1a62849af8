"""Retrodirective wireless power transfer with ambient-backscatter training."""

__version__ = "0.1.0"

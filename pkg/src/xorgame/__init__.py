"""Satisfiability thresholds of random K-XORGAME systems over GF(2)."""

__version__ = "0.1.0"

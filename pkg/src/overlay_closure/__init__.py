"""Matching-based overlay closure for permutation-structured 0/1 programs."""

__version__ = "0.1.0"

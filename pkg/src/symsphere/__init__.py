"""Majorana-representation toolkit for permutation-symmetric multiqubit states."""

__version__ = "0.1.0"

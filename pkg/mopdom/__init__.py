"""Disjunctive domination on maximal outerplanar graphs."""

__version__ = "1.0.0"

"""Automatic structures and Cayley-graph-automatic group presentations."""

__version__ = "0.1.0"

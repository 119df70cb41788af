"""Realize 3-connected simple plane graphs as standard ball polyhedra."""

__version__ = "0.1.0"

"""Exact counting of integer points in parametric polyhedra."""
__version__ = "0.1.0"

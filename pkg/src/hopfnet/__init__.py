"""Exact tools for precluding simple Hopf bifurcations in mass-action networks."""

__version__ = "0.1.0"

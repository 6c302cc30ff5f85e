"""Exact solutions of massless N=2 TBA equations and their numerical verification."""

__version__ = "0.1.0"

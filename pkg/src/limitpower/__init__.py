"""Finite-scale workbench for clone powers and limit reduced powers of the full clone."""

__version__ = "0.1.0"

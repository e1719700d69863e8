"""Exact and numeric workbench for the q-Dirac operator on quantum SU(2)."""

__version__ = "0.1.0"

"""Delone point sets and finite-window diagnostics of their almost periodicity"""

__version__ = "1.0.0"

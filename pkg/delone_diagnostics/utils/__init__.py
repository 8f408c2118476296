"""Module for reusable utility functions: formulas and file formats."""

from . import formula as formula

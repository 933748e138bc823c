"""
Bounds

Counting formulas and probability bounds on frozen colourings, checked
against exhaustive oracles.
"""

from .bounds import BoundReport, verify_bound

__all__ = ["BoundReport", "verify_bound"]

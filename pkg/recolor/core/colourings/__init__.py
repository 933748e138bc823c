"""
Colourings

Colouring types and predicates, exhaustive enumeration, extension counts and
the recolouring graph (in `reconfiguration`).
"""

from .colouring import Colouring, LinearOrder, PartialColouring, enumerate_colourings

__all__ = ["Colouring", "LinearOrder", "PartialColouring", "enumerate_colourings"]

"""
Recolor Lab - Colouring Reconfiguration and Glauber Dynamics Toolkit

Enumerates proper, frugal and frozen colourings, builds recolouring graphs,
simulates Glauber dynamics with exact and statistical mixing diagnostics,
constructs the graph families around frozen colourings, and checks the
counting bounds on frozen colourings against exhaustive oracles.
"""

__version__ = "0.1.0"

__all__ = []

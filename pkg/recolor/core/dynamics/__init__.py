"""
Dynamics

Glauber dynamics for proper colourings and its mixing diagnostics.
"""

from .glauber import Chain, TVProfile, EventEstimate

__all__ = ["Chain", "TVProfile", "EventEstimate"]

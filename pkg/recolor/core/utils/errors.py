"""
Error types raised by the recolouring toolkit.

Domain modules raise these; the tool layer turns them into status dicts.
"""

from typing import Any, Optional


class RecolorError(Exception):
    """Base class for all toolkit errors."""


class InputError(RecolorError, ValueError):
    """An argument violates an operation's precondition."""


class BudgetExceededError(RecolorError, RuntimeError):
    """A hard work budget (nodes, steps, seconds, attempts) ran out.

    ``partial`` carries whatever was computed before the budget tripped,
    e.g. the partial colouring count or the escape times seen so far.
    """

    def __init__(self, message: str, partial: Optional[Any] = None):
        super().__init__(message)
        self.partial = partial


class UnsupportedError(RecolorError):
    """No exact route applies to the requested computation."""


class StructureError(RecolorError):
    """A structural assumption about a graph or meta-graph does not hold."""


class ReducibleChainError(StructureError):
    """The chain restricted to the requested state set is not irreducible."""

    def __init__(self, message: str, component_count: int):
        super().__init__(message)
        self.component_count = component_count

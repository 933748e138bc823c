"""
Graphs

Graph representation, structural queries and the graph families used by the
experiments (J(l), lifts of cliques, random regular graphs).
"""

from .graph_core import Graph, build_graph

__all__ = ["Graph", "build_graph"]

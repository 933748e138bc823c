"""
Recolor Lab Core - Graphs, Colourings, Dynamics and Bounds

Contains the domain code (graphs, colourings, the recolouring chain, bound
evaluators), the data layer (file formats, corpora, exports) and the tool
classes that turn them into reproducible experiments.
"""

__all__ = []

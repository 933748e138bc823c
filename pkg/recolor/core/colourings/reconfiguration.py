"""
Recolouring Graph

The k-recolouring graph C_k(G): one state per proper k-colouring, two states
adjacent iff they differ at exactly one vertex. Frozen colourings are its
isolated vertices; for Δ >= 3 and k = Δ+1 the remaining states form a single
component.
"""

import json
import logging
import os
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field

from recolor.core.colourings.colouring import Colouring, all_colourings
from recolor.core.data.graph_files import save_graph
from recolor.core.graphs.graph_core import Graph, VertexSet, connected_components
from recolor.core.utils.config import config
from recolor.core.utils.errors import StructureError, UnsupportedError
from recolor.core.utils.helpers import chunk_range

logger = logging.getLogger(__name__)

State = Tuple[int, ...]


def _recolour_targets(g: Graph, k: int, state: Sequence[int], index: Dict[State, int]) -> List[int]:
    targets = []
    for v in range(g.n):
        blocked = {state[u] for u in g.adjacency[v]}
        blocked.add(state[v])
        for c in range(1, k + 1):
            if c not in blocked:
                moved = list(state)
                moved[v] = c
                targets.append(index[tuple(moved)])
    return targets


def _scan_chunk(args) -> List[List[int]]:
    g, k, states, start, stop = args
    index = {s: i for i, s in enumerate(states)}
    return [_recolour_targets(g, k, states[i], index) for i in range(start, stop)]


class RecolouringGraph:
    """States (colour tuples, enumeration order) plus the meta-adjacency."""

    def __init__(self, g: Graph, k: int, states: List[State], adjacency: List[List[int]]):
        self.g = g
        self.k = k
        self.states = states
        self.adjacency = adjacency
        self.index: Dict[State, int] = {s: i for i, s in enumerate(states)}

    def __len__(self) -> int:
        return len(self.states)

    def __repr__(self) -> str:
        return f"RecolouringGraph(states={len(self.states)}, edges={self.edge_count}, k={self.k})"

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return [(i, j) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j]

    def colouring(self, i: int) -> Colouring:
        return Colouring(self.states[i], self.k)

    def neighbours(self, i: int) -> List[int]:
        return self.adjacency[i]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def isolated(self) -> List[int]:
        return [i for i, nbrs in enumerate(self.adjacency) if not nbrs]

    def component_of(self, i: int) -> VertexSet:
        seen = {i}
        queue = deque([i])
        while queue:
            u = queue.popleft()
            for w in self.adjacency[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return frozenset(seen)

    def as_graph(self) -> Graph:
        return Graph(len(self.states), self.edges)


def build_recolouring_graph(
    g: Graph,
    k: int,
    max_nodes: Optional[int] = None,
    workers: int = 1,
) -> RecolouringGraph:
    """Enumerate Ω_k(G), then find each state's one-vertex recolourings by hash lookup."""
    states = all_colourings(g, k, max_nodes=max_nodes)
    logger.info(f"Building the {k}-recolouring graph of {g} on {len(states)} states")

    if workers > 1 and len(states) > 1:
        tasks = [(g, k, states, start, stop) for start, stop in chunk_range(len(states), workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            adjacency = [row for chunk in pool.map(_scan_chunk, tasks) for row in chunk]
    else:
        adjacency = _scan_chunk((g, k, states, 0, len(states)))

    return RecolouringGraph(g, k, states, adjacency)


class ComponentSummary(BaseModel):
    """Component structure of a recolouring graph."""
    states: int = Field(description="Number of colourings")
    isolated_count: int = Field(description="States with no recolouring move (frozen at k = Δ+1)")
    nontrivial_components: List[int] = Field(description="Sizes of components with at least two states, largest first")


def component_summary(rg: RecolouringGraph) -> ComponentSummary:
    sizes = [len(c) for c in connected_components(rg.as_graph())]
    return ComponentSummary(
        states=len(rg),
        isolated_count=sum(1 for s in sizes if s == 1),
        nontrivial_components=sorted((s for s in sizes if s > 1), reverse=True),
    )


def _eccentricity(rg: RecolouringGraph, source: int) -> int:
    dist = {source: 0}
    queue = deque([source])
    far = 0
    while queue:
        u = queue.popleft()
        for w in rg.adjacency[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                far = max(far, dist[w])
                queue.append(w)
    return far


def nonfrozen_diameter(rg: RecolouringGraph) -> int:
    """Exact diameter of the unique component with at least two states (BFS from every state)."""
    if len(rg) > config.MAX_DIAMETER_STATES:
        raise UnsupportedError(f"Diameter refused above {config.MAX_DIAMETER_STATES} states, got {len(rg)}")

    nontrivial = [c for c in connected_components(rg.as_graph()) if len(c) > 1]
    if len(nontrivial) != 1:
        raise StructureError(f"Expected exactly one non-trivial component, found {len(nontrivial)}")

    return max(_eccentricity(rg, source) for source in nontrivial[0])


def export_recolouring_graph(rg: RecolouringGraph, path: str) -> str:
    """Write the meta-graph as a graph file plus a ``.states.json`` sidecar; returns the sidecar path."""
    save_graph(rg.as_graph(), path, provenance={"family": "recolouring-graph", "k": rg.k, "n": rg.g.n})

    sidecar = os.path.splitext(path)[0] + ".states.json"
    with open(sidecar, "w") as f:
        json.dump({"k": rg.k, "states": [list(s) for s in rg.states]}, f, indent=2)

    logger.info(f"Exported {rg} to {path} and {sidecar}")
    return sidecar

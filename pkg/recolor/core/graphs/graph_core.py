"""
Graph Core

Immutable simple undirected graphs on vertices 0..n-1 and the structural
queries used throughout the toolkit: neighbourhoods, girth, components,
modules, twins, cliques and short-cycle counts.
"""

import logging
from collections import deque
from typing import FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import networkx as nx

from recolor.core.utils.errors import InputError

logger = logging.getLogger(__name__)

VertexSet = FrozenSet[int]


class Graph:
    """Simple undirected graph with sorted adjacency lists.

    Instances are immutable after construction and safe to share between
    threads and to pickle into worker processes.
    """

    __slots__ = ("n", "edges", "adjacency", "_neighbour_sets")

    def __init__(self, n: int, edges: Iterable[Tuple[int, int]]):
        normalized = frozenset((min(u, v), max(u, v)) for u, v in edges)
        neighbours: List[List[int]] = [[] for _ in range(n)]
        for u, v in normalized:
            neighbours[u].append(v)
            neighbours[v].append(u)

        self.n = n
        self.edges: FrozenSet[Tuple[int, int]] = normalized
        self.adjacency: Tuple[Tuple[int, ...], ...] = tuple(tuple(sorted(nbrs)) for nbrs in neighbours)
        self._neighbour_sets: Tuple[FrozenSet[int], ...] = tuple(frozenset(nbrs) for nbrs in neighbours)

    def __getstate__(self):
        return (self.n, self.edges)

    def __setstate__(self, state):
        n, edges = state
        self.__init__(n, edges)

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, max_degree={self.max_degree})"

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(len(nbrs) for nbrs in self.adjacency)

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def neighbours(self, v: int) -> Tuple[int, ...]:
        return self.adjacency[v]

    def neighbour_set(self, v: int) -> FrozenSet[int]:
        return self._neighbour_sets[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._neighbour_sets[u]

    def is_regular(self, degree: Optional[int] = None) -> bool:
        target = self.max_degree if degree is None else degree
        return all(d == target for d in self.degrees)

    def induced_subgraph(self, vertices: Iterable[int]) -> Tuple["Graph", Tuple[int, ...]]:
        """Induced subgraph relabelled to 0..|S|-1; also returns new→old vertex ids."""
        kept = tuple(sorted(set(vertices)))
        position = {v: i for i, v in enumerate(kept)}
        edges = [
            (position[u], position[v])
            for u, v in self.edges
            if u in position and v in position
        ]
        return Graph(len(kept), edges), kept

    def remove_vertices(self, vertices: Iterable[int]) -> Tuple["Graph", Tuple[int, ...]]:
        removed = set(vertices)
        return self.induced_subgraph(v for v in range(self.n) if v not in removed)


class Neighbourhoods(NamedTuple):
    open: VertexSet
    closed: VertexSet
    second: VertexSet


def build_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Validate an edge list and build the graph (duplicate pairs collapse)."""
    if n < 0:
        raise InputError(f"Vertex count must be non-negative, got {n}")

    checked = []
    for pair in edges:
        u, v = int(pair[0]), int(pair[1])
        if not (0 <= u < n and 0 <= v < n):
            raise InputError(f"Edge ({u}, {v}) has an endpoint outside 0..{n - 1}")
        if u == v:
            raise InputError(f"Loop at vertex {u}: graphs must be simple")
        checked.append((u, v))

    return Graph(n, checked)


def _check_vertex(g: Graph, v: int):
    if not 0 <= v < g.n:
        raise InputError(f"Vertex {v} outside 0..{g.n - 1}")


def neighbourhoods(g: Graph, v: int) -> Neighbourhoods:
    """Open, closed and second neighbourhood of v; the second is disjoint from N[v]."""
    _check_vertex(g, v)
    open_set = g.neighbour_set(v)
    closed = open_set | {v}
    second = set()
    for u in open_set:
        second.update(g.neighbour_set(u))
    return Neighbourhoods(open_set, frozenset(closed), frozenset(second - closed))


def girth(g: Graph) -> Optional[int]:
    """Length of a shortest cycle, or None for a forest."""
    best: Optional[int] = None

    for root in range(g.n):
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            # No shorter cycle through this root can appear deeper in the BFS.
            if best is not None and 2 * dist[u] >= best:
                break
            for w in g.adjacency[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    length = dist[u] + dist[w] + 1
                    if best is None or length < best:
                        best = length

    return best


def connected_components(g: Graph) -> List[VertexSet]:
    """Maximal connected vertex sets, ordered by smallest member."""
    seen = [False] * g.n
    components = []

    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = True
        members = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in g.adjacency[u]:
                if not seen[w]:
                    seen[w] = True
                    members.append(w)
                    queue.append(w)
        components.append(frozenset(members))

    return components


def is_connected(g: Graph) -> bool:
    return g.n > 0 and len(connected_components(g)) == 1


def is_module(g: Graph, x: Iterable[int]) -> bool:
    """True iff every vertex outside x sees all of x or none of it."""
    members = frozenset(x)
    if not members:
        raise InputError("A module must be non-empty")
    for v in members:
        _check_vertex(g, v)

    size = len(members)
    for v in range(g.n):
        if v in members:
            continue
        hits = len(g.neighbour_set(v) & members)
        if hits not in (0, size):
            return False

    return True


def twins(g: Graph, x: int) -> VertexSet:
    """All w with N[w] = N[x]; always contains x."""
    _check_vertex(g, x)
    closed_x = g.neighbour_set(x) | {x}
    return frozenset(w for w in closed_x if (g.neighbour_set(w) | {w}) == closed_x)


def _degeneracy_order(g: Graph) -> List[int]:
    degree = list(g.degrees)
    removed = [False] * g.n
    order = []
    for _ in range(g.n):
        v = min((u for u in range(g.n) if not removed[u]), key=lambda u: (degree[u], u))
        removed[v] = True
        order.append(v)
        for w in g.adjacency[v]:
            if not removed[w]:
                degree[w] -= 1
    return order


def has_clique(g: Graph, s: int) -> bool:
    """Exact clique search: branch over a degeneracy order, bound by candidate count."""
    if s < 1:
        raise InputError(f"Clique size must be at least 1, got {s}")
    if s == 1:
        return g.n >= 1
    if s == 2:
        return g.m >= 1
    if s - 1 > g.max_degree:
        return False

    order = _degeneracy_order(g)
    rank = {v: i for i, v in enumerate(order)}

    def extend(needed: int, candidates: List[int]) -> bool:
        if needed == 0:
            return True
        if len(candidates) < needed:
            return False
        for i, u in enumerate(candidates):
            nbrs = g.neighbour_set(u)
            if extend(needed - 1, [w for w in candidates[i + 1:] if w in nbrs]):
                return True
        return False

    for v in order:
        later = sorted((w for w in g.adjacency[v] if rank[w] > rank[v]), key=rank.__getitem__)
        if extend(s - 1, later):
            return True

    return False


def count_cycles(g: Graph, length: int) -> int:
    """Number of simple cycles with exactly `length` edges."""
    if length < 3:
        raise InputError(f"Cycle length must be at least 3, got {length}")

    total = 0

    def walk(start: int, current: int, depth: int, on_path: set):
        nonlocal total
        for w in g.adjacency[current]:
            if w == start and depth == length:
                total += 1
            elif w > start and w not in on_path and depth < length:
                on_path.add(w)
                walk(start, w, depth + 1, on_path)
                on_path.remove(w)

    # Each cycle is found once per direction from its smallest vertex.
    for start in range(g.n):
        walk(start, start, 1, {start})

    return total // 2


def to_networkx(g: Graph) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(g.n))
    graph.add_edges_from(g.edges)
    return graph


def is_isomorphic(g: Graph, h: Graph) -> bool:
    if g.n != h.n or g.m != h.m or sorted(g.degrees) != sorted(h.degrees):
        return False
    return nx.is_isomorphic(to_networkx(g), to_networkx(h))

"""
Graph Constructions

Generators for the graph families used in the experiments: elementary
families, the ring-of-fibers graph J(l), lifts of the clique K_{Δ+1}
(deterministic and uniformly random), uniformly random Δ-regular graphs via
the configuration model, and the distinguished colourings on them.

Vertex naming for J and for lifts: index = fiber·(Δ+1) + row, so vertex i of
a lift is the copy (i mod (Δ+1), i div (Δ+1)) of base vertex i mod (Δ+1).
"""

import logging
import math
from itertools import combinations, permutations, product
from typing import Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from recolor.core.colourings.colouring import Colouring, first_colouring, is_frozen
from recolor.core.graphs.graph_core import Graph, VertexSet, build_graph
from recolor.core.utils.config import config
from recolor.core.utils.errors import InputError
from recolor.core.utils.helpers import RejectedSample, make_rng, retry_on_rejection

logger = logging.getLogger(__name__)

MAX_LIFT_SPECS = 10_000


# Elementary families

def complete_graph(n: int) -> Graph:
    return build_graph(n, combinations(range(n), 2))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InputError(f"A cycle needs at least 3 vertices, got {n}")
    return build_graph(n, [(v, (v + 1) % n) for v in range(n)])


def path_graph(n: int) -> Graph:
    """Path on n vertices (P_2 is a single edge)."""
    if n < 1:
        raise InputError(f"A path needs at least 1 vertex, got {n}")
    return build_graph(n, [(v, v + 1) for v in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    """K_{1,leaves} with centre 0."""
    return build_graph(leaves + 1, [(0, v) for v in range(1, leaves + 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    return build_graph(a + b, [(u, a + v) for u in range(a) for v in range(b)])


def empty_graph(n: int) -> Graph:
    return build_graph(n, [])


# J(l)

def j_vertex(fiber: int, row: int, delta: int) -> int:
    """Index of the vertex in row `row` (0..Δ) of fiber `fiber` (0-based)."""
    return fiber * (delta + 1) + row


def j_label(vertex: int, delta: int) -> str:
    """1-based v_i^j name of a J vertex, for reports."""
    fiber, row = divmod(vertex, delta + 1)
    return f"v_{fiber + 1}^{row + 1}"


def _check_j_params(l: int, delta: int):
    if l < 2:
        raise InputError(f"J needs at least 2 fibers, got {l}")
    if delta < 2:
        raise InputError(f"J needs Δ >= 2, got {delta}")


def build_J(l: int, delta: int) -> Graph:
    """Ring of l fibers; each fiber is K_{Δ+1} minus its first-last edge.

    The first vertex of fiber i+1 is joined to the last vertex of fiber i
    (indices mod l), which makes the graph Δ-regular.
    """
    _check_j_params(l, delta)
    edges = []
    for fiber in range(l):
        for r1, r2 in combinations(range(delta + 1), 2):
            if (r1, r2) != (0, delta):
                edges.append((j_vertex(fiber, r1, delta), j_vertex(fiber, r2, delta)))
        edges.append((j_vertex((fiber + 1) % l, 0, delta), j_vertex(fiber, delta, delta)))

    g = build_graph(l * (delta + 1), edges)
    logger.debug(f"Built J({l}) with Δ={delta}: {g}")
    return g


def canonical_frozen_of_J(l: int, delta: int) -> Colouring:
    """The row colouring: vertex in row r gets colour r+1."""
    _check_j_params(l, delta)
    return Colouring((v % (delta + 1) + 1 for v in range(l * (delta + 1))), delta + 1)


def module_sets_of_J(l: int, delta: int) -> List[VertexSet]:
    """The inner rows 1..Δ-1 of every fiber; each one is a module of J(l)."""
    _check_j_params(l, delta)
    return [frozenset(j_vertex(fiber, row, delta) for row in range(1, delta)) for fiber in range(l)]


class JTag(BaseModel):
    """Identifies J(2·k_level) with max degree delta, for the level sets S_i."""
    model_config = ConfigDict(frozen=True)

    k_level: int = Field(description="Half the number of fibers; J has 2·k_level fibers")
    delta: int = Field(description="Maximum degree Δ")

    @property
    def fibers(self) -> int:
        return 2 * self.k_level

    @property
    def n(self) -> int:
        return self.fibers * (self.delta + 1)


def level_set_vertices(tag: JTag, i: int) -> List[int]:
    """First-row vertices that must carry colour 1 inside S_i.

    These are the first vertices of fibers i+1..2k+1-i in 1-based fiber
    numbering; fewer vertices are pinned as i grows, so S_1 ⊆ S_2 ⊆ ... ⊆ S_k.
    """
    if not 1 <= i <= tag.k_level:
        raise InputError(f"Level must lie in 1..{tag.k_level}, got {i}")
    return [j_vertex(j - 1, 0, tag.delta) for j in range(i + 1, 2 * tag.k_level + 2 - i)]


def in_level_set(state, tag: JTag, i: int) -> bool:
    return all(state[v] == 1 for v in level_set_vertices(tag, i))


def beta_start(k_level: int, delta: int) -> Tuple[Graph, Colouring]:
    """J(2k) with the row colouring, except the first vertex of the first fiber
    takes colour Δ+1 and the last vertex of the last fiber takes colour 1."""
    if k_level < 2:
        raise InputError(f"k_level must be at least 2, got {k_level}")

    l = 2 * k_level
    g = build_J(l, delta)
    colours = [v % (delta + 1) + 1 for v in range(g.n)]
    colours[j_vertex(0, 0, delta)] = delta + 1
    colours[j_vertex(l - 1, delta, delta)] = 1
    return g, Colouring(colours, delta + 1)


# Lifts of K_{Δ+1}

def base_edges(delta: int) -> List[Tuple[int, int]]:
    """Edges of K_{Δ+1} in lexicographic order; LiftSpec.matchings follows this order."""
    return list(combinations(range(delta + 1), 2))


def _matching_problem(delta: int, k: int, matchings: List[List[int]]) -> Optional[str]:
    expected = (delta + 1) * delta // 2
    if len(matchings) != expected:
        return f"Expected {expected} matchings for K_{delta + 1}, got {len(matchings)}"
    identity = list(range(k))
    for (u, v), perm in zip(base_edges(delta), matchings):
        if sorted(perm) != identity:
            return f"Matching for base edge ({u}, {v}) is not a permutation of 0..{k - 1}"
    return None


class LiftSpec(BaseModel):
    """A k-lift of K_{Δ+1}: one perfect matching between fibers per base edge."""
    delta: int = Field(ge=0, description="Maximum degree Δ of the lift (base graph K_{Δ+1})")
    k: int = Field(ge=1, description="Fiber size")
    matchings: List[List[int]] = Field(
        description="For each base edge (u, v) in lexicographic order, perm[a] = b joins copy a of u to copy b of v"
    )

    @model_validator(mode="after")
    def _check_bijections(self):
        problem = _matching_problem(self.delta, self.k, self.matchings)
        if problem:
            raise ValueError(problem)
        return self

    @property
    def n(self) -> int:
        return self.k * (self.delta + 1)


def build_lift(spec: LiftSpec) -> Graph:
    """Vertex (u, a) has index a·(Δ+1) + u."""
    problem = _matching_problem(spec.delta, spec.k, spec.matchings)
    if problem:
        raise InputError(problem)

    width = spec.delta + 1
    edges = []
    for (u, v), perm in zip(base_edges(spec.delta), spec.matchings):
        for a, b in enumerate(perm):
            edges.append((a * width + u, b * width + v))

    return build_graph(spec.n, edges)


def random_lift_spec(delta: int, k: int, seed: int) -> LiftSpec:
    """Independent uniform perfect matchings for every base edge."""
    if k < 1:
        raise InputError(f"Fiber size must be at least 1, got {k}")
    rng = make_rng(seed)
    matchings = [rng.permutation(k).tolist() for _ in base_edges(delta)]
    return LiftSpec(delta=delta, k=k, matchings=matchings)


def random_lift(delta: int, k: int, seed: int) -> Graph:
    return build_lift(random_lift_spec(delta, k, seed))


def all_lift_specs(delta: int, k: int) -> Iterator[LiftSpec]:
    """Every k-lift of K_{Δ+1} up to relabelling copies within fibers.

    Matchings on the base edges at vertex 0 are fixed to the identity; any lift
    can be relabelled into that form, so the remaining edges range over all of
    (k!)^{C(Δ,2)} permutation choices.
    """
    if k < 1:
        raise InputError(f"Fiber size must be at least 1, got {k}")
    free = math.comb(delta, 2)
    total = math.factorial(k) ** free
    if total > MAX_LIFT_SPECS:
        raise InputError(f"{total} lift specs for Δ={delta}, k={k} exceed the limit of {MAX_LIFT_SPECS}")

    identity = list(range(k))
    for choice in product(permutations(range(k)), repeat=free):
        matchings = [identity] * delta + [list(perm) for perm in choice]
        yield LiftSpec(delta=delta, k=k, matchings=matchings)


def pullback_colouring(spec: LiftSpec) -> Colouring:
    """Colour every copy of base vertex u with u+1; always frozen."""
    width = spec.delta + 1
    return Colouring((v % width + 1 for v in range(spec.n)), width)


def lift_from_colouring(g: Graph, a: Colouring) -> LiftSpec:
    """Read the lift decomposition off a frozen colouring.

    Colour classes become fibers (copies numbered by sorted vertex id) and the
    perfect matching between two classes becomes the base-edge permutation.
    """
    if not is_frozen(g, a):
        raise InputError("A lift can only be read off a frozen colouring")

    delta = a.k - 1
    classes = a.classes()
    members = {c: sorted(classes[c + 1]) for c in range(a.k)}
    position = {c: {v: i for i, v in enumerate(vs)} for c, vs in members.items()}
    k = len(members[0])

    matchings = []
    for u, v in base_edges(delta):
        perm = [0] * k
        for index, x in enumerate(members[u]):
            partner = next(y for y in g.adjacency[x] if a[y] == v + 1)
            perm[index] = position[v][partner]
        matchings.append(perm)

    return LiftSpec(delta=delta, k=k, matchings=matchings)


def detect_lift_structure(g: Graph, max_nodes: Optional[int] = None) -> Optional[LiftSpec]:
    """LiftSpec of g if g carries a frozen colouring, else None.

    Frozen colourings need a Δ-regular graph and (Δ+1) | n; on such graphs
    frozen and frugal (Δ+1)-colourings coincide, so the search runs with
    frugality pruning and stops at the first hit.
    """
    if g.n == 0 or not g.is_regular():
        return None
    delta = g.max_degree
    if g.n % (delta + 1):
        return None

    found = first_colouring(g, delta + 1, "frugal", max_nodes=max_nodes)
    if found is None:
        return None
    return lift_from_colouring(g, found)


# Random regular graphs

@retry_on_rejection(max_attempts=config.MAX_CONFIGURATION_ATTEMPTS)
def _pair_half_edges(n: int, delta: int, rng: np.random.Generator) -> List[Tuple[int, int]]:
    points = np.repeat(np.arange(n), delta)
    rng.shuffle(points)
    pairs = points.reshape(-1, 2)

    seen = set()
    for u, v in pairs.tolist():
        if u == v:
            raise RejectedSample
        edge = (min(u, v), max(u, v))
        if edge in seen:
            raise RejectedSample
        seen.add(edge)
    return sorted(seen)


def random_regular(n: int, delta: int, seed: int) -> Graph:
    """Uniform simple Δ-regular graph: configuration model, restarted until simple."""
    if (n * delta) % 2:
        raise InputError(f"n·Δ must be even, got n={n}, Δ={delta}")
    if n <= delta:
        raise InputError(f"Need n > Δ, got n={n}, Δ={delta}")
    if delta < 0:
        raise InputError(f"Δ must be non-negative, got {delta}")

    rng = make_rng(seed)
    return build_graph(n, _pair_half_edges(n, delta, rng))

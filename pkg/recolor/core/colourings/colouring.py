"""
Colourings

Total and partial colourings, linear orders, the proper / frugal / frozen
predicates, exhaustive enumeration by backtracking, and the three extension
counts (proper, frugal and degree extensions of a partial colouring).
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from recolor.core.graphs.graph_core import Graph, VertexSet, is_module, neighbourhoods
from recolor.core.utils.config import config
from recolor.core.utils.errors import BudgetExceededError, InputError
from recolor.core.utils.helpers import WorkBudget

logger = logging.getLogger(__name__)

FILTERS = ("all", "frugal", "frozen")


class Colouring:
    """Total assignment vertex -> colour in 1..k."""

    __slots__ = ("colours", "k")

    def __init__(self, colours: Iterable[int], k: int):
        colours = tuple(int(c) for c in colours)
        if k < 1:
            raise InputError(f"Palette size must be at least 1, got {k}")
        for v, c in enumerate(colours):
            if not 1 <= c <= k:
                raise InputError(f"Colour {c} at vertex {v} outside 1..{k}")
        self.colours = colours
        self.k = k

    def __getitem__(self, v: int) -> int:
        return self.colours[v]

    def __len__(self) -> int:
        return len(self.colours)

    def __iter__(self) -> Iterator[int]:
        return iter(self.colours)

    def __eq__(self, other) -> bool:
        return isinstance(other, Colouring) and self.k == other.k and self.colours == other.colours

    def __hash__(self) -> int:
        return hash((self.k, self.colours))

    def __repr__(self) -> str:
        return f"Colouring({list(self.colours)}, k={self.k})"

    def classes(self) -> Dict[int, VertexSet]:
        """Colour classes for every colour of the palette (possibly empty)."""
        members: Dict[int, list] = {c: [] for c in range(1, self.k + 1)}
        for v, c in enumerate(self.colours):
            members[c].append(v)
        return {c: frozenset(vs) for c, vs in members.items()}

    def restrict(self, domain: Iterable[int]) -> "PartialColouring":
        return PartialColouring({v: self.colours[v] for v in domain}, self.k)

    def recoloured(self, v: int, c: int) -> "Colouring":
        colours = list(self.colours)
        colours[v] = c
        return Colouring(colours, self.k)

    def relabelled(self, perm: Mapping[int, int]) -> "Colouring":
        return Colouring((perm.get(c, c) for c in self.colours), self.k)


class PartialColouring:
    """Assignment over a vertex subset D; proper on G[D] when used as an extension base."""

    __slots__ = ("assignment", "k")

    def __init__(self, assignment: Mapping[int, int], k: int):
        for v, c in assignment.items():
            if not 1 <= c <= k:
                raise InputError(f"Colour {c} at vertex {v} outside 1..{k}")
        self.assignment: Dict[int, int] = dict(assignment)
        self.k = k

    def __getitem__(self, v: int) -> int:
        return self.assignment[v]

    def __contains__(self, v: int) -> bool:
        return v in self.assignment

    def __repr__(self) -> str:
        return f"PartialColouring({dict(sorted(self.assignment.items()))}, k={self.k})"

    @property
    def domain(self) -> VertexSet:
        return frozenset(self.assignment)

    def extended(self, v: int, c: int) -> "PartialColouring":
        assignment = dict(self.assignment)
        assignment[v] = c
        return PartialColouring(assignment, self.k)

    def is_proper_on(self, g: Graph) -> bool:
        a = self.assignment
        return all(a[u] != a[v] for u, v in g.edges if u in a and v in a)

    def is_frugal_on(self, g: Graph) -> bool:
        """Frugality of the induced subgraph G[D]."""
        a = self.assignment
        for v in a:
            seen = [a[u] for u in g.adjacency[v] if u in a]
            if len(seen) != len(set(seen)):
                return False
        return True


class LinearOrder:
    """A bijection vertex -> position; u precedes v iff rank[u] < rank[v]."""

    __slots__ = ("order", "rank")

    def __init__(self, order: Sequence[int]):
        order = tuple(int(v) for v in order)
        if sorted(order) != list(range(len(order))):
            raise InputError("A linear order must list every vertex 0..n-1 exactly once")
        rank = [0] * len(order)
        for position, v in enumerate(order):
            rank[v] = position
        self.order = order
        self.rank = tuple(rank)

    def __len__(self) -> int:
        return len(self.order)

    def __repr__(self) -> str:
        return f"LinearOrder({list(self.order)})"

    @classmethod
    def identity(cls, n: int) -> "LinearOrder":
        return cls(range(n))

    @classmethod
    def suffix_order(cls, n: int, t: Iterable[int], rng: np.random.Generator) -> "LinearOrder":
        """Random order in which every vertex outside t precedes every vertex of t."""
        suffix = sorted(set(t))
        prefix = [v for v in range(n) if v not in set(suffix)]
        rng.shuffle(prefix)
        rng.shuffle(suffix)
        return cls(list(prefix) + list(suffix))

    def precedes(self, u: int, v: int) -> bool:
        return self.rank[u] < self.rank[v]

    def back_degree(self, g: Graph, v: int) -> int:
        """d_sigma(v): neighbours of v that come before v."""
        return sum(1 for u in g.adjacency[v] if self.rank[u] < self.rank[v])

    def is_suffix(self, t: Iterable[int]) -> bool:
        members = set(t)
        return all(v in members for v in self.order[len(self.order) - len(members):])


class EnumerationResult(BaseModel):
    """Outcome of an exhaustive colouring enumeration."""
    count: int = Field(description="Exact number of colourings passing the filter")
    filter: str = Field(description="One of all, frugal, frozen")
    k: int = Field(description="Palette size")
    n: int = Field(description="Vertex count of the graph")
    nodes: int = Field(description="Search nodes explored")
    elapsed: float = Field(description="Wall-clock seconds")


class _StopSearch(Exception):
    pass


def vertex_order(g: Graph) -> List[int]:
    """Descending degree, ties by id."""
    return sorted(range(g.n), key=lambda v: (-g.degree(v), v))


class ColouringSearch:
    """Backtracking over colourings with forward pruning.

    ``seen[v][c]`` counts the coloured neighbours of v with colour c, so
    properness of c at v is ``seen[v][c] == 0`` and frugality additionally
    needs ``seen[u][c] == 0`` for every neighbour u of v. Frozen colourings
    are frugal, so the frozen filter runs the frugal search and tests each
    leaf with the frozen predicate.
    """

    def __init__(
        self,
        g: Graph,
        k: int,
        mode: str = "all",
        fixed: Optional[Mapping[int, int]] = None,
        budget: Optional[WorkBudget] = None,
    ):
        if mode not in FILTERS:
            raise InputError(f"Unknown filter {mode!r}; expected one of {FILTERS}")
        if k < 1:
            raise InputError(f"Palette size must be at least 1, got {k}")

        self.g = g
        self.k = k
        self.mode = mode
        self.frugal = mode in ("frugal", "frozen")
        self.budget = budget or WorkBudget(
            config.ENUMERATION_NODE_BUDGET, config.WALL_SECONDS_BUDGET or None, label="enumeration"
        )
        self.colour = [0] * g.n
        self.seen = [[0] * (k + 1) for _ in range(g.n)]
        self.count = 0
        self.satisfiable = True

        fixed = dict(fixed or {})
        for v, c in fixed.items():
            if not 1 <= c <= k:
                raise InputError(f"Fixed colour {c} at vertex {v} outside 1..{k}")
            if self.seen[v][c]:
                raise InputError(f"Fixed colouring is not proper at vertex {v}")
            self._assign(v, c)
        if self.frugal and any(count > 1 for row in self.seen for count in row):
            self.satisfiable = False

        self.order = [v for v in vertex_order(g) if v not in fixed]
        self._visit: Optional[Callable[[Tuple[int, ...]], None]] = None
        self._limit: Optional[int] = None

    def _assign(self, v: int, c: int):
        self.colour[v] = c
        for u in self.g.adjacency[v]:
            self.seen[u][c] += 1

    def _unassign(self, v: int, c: int):
        self.colour[v] = 0
        for u in self.g.adjacency[v]:
            self.seen[u][c] -= 1

    def _leaf_is_frozen(self) -> bool:
        k = self.k
        for v in range(self.g.n):
            row = self.seen[v]
            if sum(1 for c in range(1, k + 1) if row[c]) + 1 != k:
                return False
        return True

    def run(self, visit: Optional[Callable[[Tuple[int, ...]], None]] = None, limit: Optional[int] = None) -> int:
        if not self.satisfiable:
            return 0
        self._visit = visit
        self._limit = limit
        try:
            self._descend(0)
        except _StopSearch:
            pass
        except BudgetExceededError as exc:
            exc.partial = {"count": self.count, "nodes": self.budget.used}
            logger.warning(f"Enumeration stopped by budget after {self.count} colourings")
            raise
        return self.count

    def _descend(self, position: int):
        if position == len(self.order):
            if self.mode == "frozen" and not self._leaf_is_frozen():
                return
            self.count += 1
            if self._visit is not None:
                self._visit(tuple(self.colour))
            if self._limit is not None and self.count >= self._limit:
                raise _StopSearch
            return

        v = self.order[position]
        nbrs = self.g.adjacency[v]
        seen = self.seen
        seen_v = seen[v]
        for c in range(1, self.k + 1):
            if seen_v[c]:
                continue
            if self.frugal and any(seen[u][c] for u in nbrs):
                continue
            self.budget.record()
            self._assign(v, c)
            self._descend(position + 1)
            self._unassign(v, c)


def _count_subtree(args) -> Tuple[int, int]:
    g, k, mode, fixed, max_nodes, max_seconds = args
    search = ColouringSearch(g, k, mode, fixed, WorkBudget(max_nodes, max_seconds, label="enumeration"))
    return search.run(), search.budget.used


def _check_filter(g: Graph, k: int, filter: str):
    if filter not in FILTERS:
        raise InputError(f"Unknown filter {filter!r}; expected one of {FILTERS}")
    if filter == "frozen" and k != g.max_degree + 1:
        raise InputError(f"Frozen colourings are defined for k = max degree + 1 = {g.max_degree + 1}, got {k}")


def enumerate_colourings(
    g: Graph,
    k: int,
    filter: str = "all",
    on_colouring: Optional[Callable[[Tuple[int, ...]], None]] = None,
    max_nodes: Optional[int] = None,
    max_seconds: Optional[float] = None,
    workers: int = 1,
) -> EnumerationResult:
    """Exact count of the k-colourings passing `filter`, optionally streaming each one.

    With ``workers > 1`` (and no callback) the search fans out over the
    colour choices of the first vertex in the search order.
    """
    _check_filter(g, k, filter)
    max_nodes = config.ENUMERATION_NODE_BUDGET if max_nodes is None else max_nodes
    max_seconds = max_seconds if max_seconds is not None else (config.WALL_SECONDS_BUDGET or None)
    started = time.perf_counter()

    order = vertex_order(g)
    if workers > 1 and on_colouring is None and order:
        first = order[0]
        tasks = [(g, k, filter, {first: c}, max_nodes // k + 1, max_seconds) for c in range(1, k + 1)]
        logger.debug(f"Fanning enumeration out over {len(tasks)} branches on {workers} workers")
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_count_subtree, tasks))
        count = sum(r[0] for r in results)
        nodes = sum(r[1] for r in results)
    else:
        search = ColouringSearch(g, k, filter, budget=WorkBudget(max_nodes, max_seconds, label="enumeration"))
        count = search.run(visit=on_colouring)
        nodes = search.budget.used

    elapsed = time.perf_counter() - started
    logger.debug(f"Enumerated {count} {filter} {k}-colourings of {g} in {elapsed:.3f}s")
    return EnumerationResult(count=count, filter=filter, k=k, n=g.n, nodes=nodes, elapsed=elapsed)


def count_colourings(g: Graph, k: int, filter: str = "all", **kwargs) -> int:
    return enumerate_colourings(g, k, filter, **kwargs).count


def all_colourings(g: Graph, k: int, filter: str = "all", max_nodes: Optional[int] = None) -> List[Tuple[int, ...]]:
    """Materialize every colouring passing the filter as colour tuples."""
    members: List[Tuple[int, ...]] = []
    enumerate_colourings(g, k, filter, on_colouring=members.append, max_nodes=max_nodes)
    return members


def first_colouring(g: Graph, k: int, filter: str = "all", max_nodes: Optional[int] = None) -> Optional[Colouring]:
    _check_filter(g, k, filter)
    found: List[Tuple[int, ...]] = []
    budget = WorkBudget(config.ENUMERATION_NODE_BUDGET if max_nodes is None else max_nodes, label="search")
    ColouringSearch(g, k, filter, budget=budget).run(visit=found.append, limit=1)
    return Colouring(found[0], k) if found else None


def greedy_colouring(g: Graph, k: int) -> Colouring:
    """Smallest free colour in descending-degree order."""
    colours = [0] * g.n
    for v in vertex_order(g):
        used = {colours[u] for u in g.adjacency[v]}
        free = next((c for c in range(1, k + 1) if c not in used), None)
        if free is None:
            raise InputError(f"Greedy colouring with {k} colours got stuck at vertex {v}")
        colours[v] = free
    return Colouring(colours, k)


def _check_total(g: Graph, a: Colouring):
    if len(a) != g.n:
        raise InputError(f"Colouring covers {len(a)} vertices, graph has {g.n}")


def is_proper(g: Graph, a: Colouring) -> bool:
    _check_total(g, a)
    return all(a[u] != a[v] for u, v in g.edges)


def is_frugal(g: Graph, a: Colouring) -> bool:
    """No colour repeats inside any open neighbourhood."""
    if not is_proper(g, a):
        raise InputError("Frugality is only defined for proper colourings")
    for v in range(g.n):
        seen = [a[u] for u in g.adjacency[v]]
        if len(seen) != len(set(seen)):
            return False
    return True


def is_frozen(g: Graph, a: Colouring) -> bool:
    """Every colour of 1..Δ+1 appears in every closed neighbourhood."""
    if a.k != g.max_degree + 1:
        raise InputError(f"Frozen colourings use k = max degree + 1 = {g.max_degree + 1} colours, got {a.k}")
    if not is_proper(g, a):
        raise InputError("Frozenness is only defined for proper colourings")
    for v in range(g.n):
        if len({a[v]} | {a[u] for u in g.adjacency[v]}) != a.k:
            return False
    return True


def _check_extension_base(g: Graph, t: Iterable[int], beta: PartialColouring) -> VertexSet:
    free = frozenset(t)
    if any(not 0 <= v < g.n for v in free):
        raise InputError("Extension set contains vertices outside the graph")
    if beta.domain != frozenset(range(g.n)) - free:
        raise InputError("The partial colouring must be defined exactly on V \\ T")
    if not beta.is_proper_on(g):
        raise InputError("The partial colouring is not proper on G[V \\ T]")
    return free


def ext(g: Graph, t: Iterable[int], beta: PartialColouring, max_nodes: Optional[int] = None) -> int:
    """Number of proper k-colourings agreeing with beta off t."""
    _check_extension_base(g, t, beta)
    budget = WorkBudget(config.ENUMERATION_NODE_BUDGET if max_nodes is None else max_nodes, label="extension")
    return ColouringSearch(g, beta.k, "all", fixed=beta.assignment, budget=budget).run()


def ext_frugal(g: Graph, t: Iterable[int], beta: PartialColouring, max_nodes: Optional[int] = None) -> int:
    """Number of frugal k-colourings agreeing with beta off t (0 if beta is not frugal)."""
    _check_extension_base(g, t, beta)
    budget = WorkBudget(config.ENUMERATION_NODE_BUDGET if max_nodes is None else max_nodes, label="extension")
    return ColouringSearch(g, beta.k, "frugal", fixed=beta.assignment, budget=budget).run()


def ext_degree(g: Graph, t: Iterable[int], sigma: LinearOrder, k: Optional[int] = None) -> int:
    """Product over v in t of (Δ+1 - d_sigma(v)); independent of the colouring of V \\ t."""
    delta = g.max_degree
    if k is not None and k != delta + 1:
        raise InputError(f"Degree extensions are defined for k = max degree + 1 = {delta + 1}, got {k}")
    if len(sigma) != g.n:
        raise InputError(f"Order has {len(sigma)} vertices, graph has {g.n}")

    product = 1
    for v in frozenset(t):
        product *= delta + 1 - sigma.back_degree(g, v)
    return product


def colour_set_at_distance_two(g: Graph, x: int, beta: PartialColouring) -> frozenset:
    """beta(N²(x)): the colours beta puts on vertices at distance two from x."""
    second = neighbourhoods(g, x).second
    missing = second - beta.domain
    if missing:
        raise InputError(f"Partial colouring misses distance-two vertices {sorted(missing)}")
    return frozenset(beta[v] for v in second)


def permute_module_colours(g: Graph, a: Colouring, x: Iterable[int], perm: Mapping[int, int]) -> Colouring:
    """Apply a permutation of the colours used inside module x; the result stays frozen."""
    members = frozenset(x)
    if not is_module(g, members):
        raise InputError("The vertex set is not a module")
    if not is_frozen(g, a):
        raise InputError("The colouring is not frozen")

    used = {a[v] for v in members}
    if {perm.get(c, c) for c in used} != used:
        raise InputError(f"The permutation must map the colours used in the module {sorted(used)} onto themselves")

    colours = list(a.colours)
    for v in members:
        colours[v] = perm.get(a[v], a[v])
    return Colouring(colours, a.k)


def frozen_class_partition_check(g: Graph, a: Colouring, c: int) -> bool:
    """Colour class c has n/(Δ+1) members whose closed neighbourhoods partition V."""
    if not g.is_regular():
        raise InputError("The class partition property needs a regular graph")
    if not is_frozen(g, a):
        raise InputError("The colouring is not frozen")
    if not 1 <= c <= a.k:
        raise InputError(f"Colour {c} outside 1..{a.k}")

    members = a.classes()[c]
    if len(members) * a.k != g.n:
        return False

    covered = set()
    for x in members:
        closed = g.neighbour_set(x) | {x}
        if covered & closed:
            return False
        covered |= closed
    return len(covered) == g.n


def frozen_structure_check(g: Graph, a: Colouring) -> Dict[str, bool]:
    """Regularity, equal class sizes and pairwise perfect matchings of a frozen colouring."""
    if not is_frozen(g, a):
        raise InputError("The colouring is not frozen")

    classes = a.classes()
    sizes = {len(members) for members in classes.values()}

    matchings = True
    for c1 in range(1, a.k + 1):
        for c2 in range(c1 + 1, a.k + 1):
            pair = classes[c1] | classes[c2]
            for v in pair:
                other = classes[c2] if v in classes[c1] else classes[c1]
                if len(g.neighbour_set(v) & other) != 1:
                    matchings = False

    return {
        "regular": g.is_regular(),
        "equal_classes": len(sizes) == 1,
        "perfect_matchings": matchings,
    }

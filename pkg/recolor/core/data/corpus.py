"""
Graph Corpora

Desk-scale graph collections feeding the verification sweeps: exhaustive
labelled regular graphs, cubic graphs up to isomorphism, random small graphs
and the randomized instances for the extension-sandwich and ratio-step
checks. Every random corpus is a pure function of its seed.
"""

import logging
from collections import defaultdict
from itertools import combinations
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from recolor.core.colourings.colouring import LinearOrder, PartialColouring
from recolor.core.graphs.constructions import all_lift_specs, build_lift, random_lift, random_regular
from recolor.core.graphs.graph_core import Graph, build_graph, has_clique, is_connected, to_networkx
from recolor.core.utils.errors import InputError
from recolor.core.utils.helpers import derive_seed, make_rng

logger = logging.getLogger(__name__)

MAX_CUBIC_ORDER = 10
MAX_LIFT_FIBERS = 3


def _regular_completions(n: int, delta: int, fixed: Sequence[Tuple[int, int]] = ()) -> Iterator[Graph]:
    """Every labelled Δ-regular graph on n vertices containing the `fixed` edges.

    Vertices are completed in increasing order: vertex v picks the rest of its
    neighbours among higher vertices, so each labelled graph appears once.
    """
    residual = [delta] * n
    edges = list(fixed)
    for u, v in fixed:
        residual[u] -= 1
        residual[v] -= 1
    used = {frozenset(e) for e in edges}

    def extend(v: int) -> Iterator[Graph]:
        if v == n:
            yield build_graph(n, edges)
            return
        need = residual[v]
        candidates = [w for w in range(v + 1, n) if residual[w] > 0 and frozenset((v, w)) not in used]
        for chosen in combinations(candidates, need):
            for w in chosen:
                residual[w] -= 1
                edges.append((v, w))
            residual[v] = 0
            yield from extend(v + 1)
            for w in chosen:
                residual[w] += 1
                edges.pop()
            residual[v] = need

    yield from extend(0)


def up_to_isomorphism(graphs: Iterable[Graph]) -> List[Graph]:
    """First representative of each isomorphism class, in input order.

    Candidates are bucketed by Weisfeiler-Lehman hash and compared exactly
    only within a bucket.
    """
    buckets = defaultdict(list)
    representatives: List[Graph] = []
    for g in graphs:
        ng = to_networkx(g)
        key = nx.weisfeiler_lehman_graph_hash(ng)
        if any(nx.is_isomorphic(ng, other) for other in buckets[key]):
            continue
        buckets[key].append(ng)
        representatives.append(g)
    return representatives


def labelled_regular_graphs(n: int, delta: int) -> Iterator[Graph]:
    """All labelled simple Δ-regular graphs on vertices 0..n-1."""
    if delta < 0 or n < 0:
        raise InputError(f"Need n, Δ >= 0, got n={n}, Δ={delta}")
    if (n * delta) % 2 or (n > 0 and delta >= n):
        return iter(())
    return _regular_completions(n, delta)


def cubic_graphs(n: int, connected_only: bool = False) -> List[Graph]:
    """All cubic graphs on n vertices up to isomorphism (n <= 10).

    Every cubic graph has a labelling with N(0) = {1, 2, 3}; those labellings
    are generated and de-duplicated by Weisfeiler-Lehman hash then exact
    isomorphism.
    """
    if n % 2 or n < 4:
        raise InputError(f"Cubic graphs need an even order >= 4, got {n}")
    if n > MAX_CUBIC_ORDER:
        raise InputError(f"Exhaustive cubic corpus is limited to n <= {MAX_CUBIC_ORDER}")

    labelled = _regular_completions(n, 3, fixed=[(0, 1), (0, 2), (0, 3)])
    representatives = up_to_isomorphism(g for g in labelled if not connected_only or is_connected(g))
    logger.info(f"Cubic corpus n={n}: {len(representatives)} graphs up to isomorphism")
    return representatives


def lift_graphs(delta: int, k: int, connected_only: bool = False) -> List[Graph]:
    """Every k-lift of K_{Δ+1} up to isomorphism, from the exhaustive lift specs."""
    lifts = (build_lift(spec) for spec in all_lift_specs(delta, k))
    representatives = up_to_isomorphism(g for g in lifts if not connected_only or is_connected(g))
    logger.info(f"Lift corpus Δ={delta}, k={k}: {len(representatives)} graphs up to isomorphism")
    return representatives


def random_small_graph(n: int, seed: int) -> Graph:
    """G(n, p) with p itself drawn from [0.2, 0.8]."""
    rng = make_rng(seed)
    p = rng.uniform(0.2, 0.8)
    return build_graph(n, [(u, v) for u, v in combinations(range(n), 2) if rng.random() < p])


def random_small_graphs(count: int, max_n: int, seed: int, min_n: int = 1) -> List[Graph]:
    rng = make_rng(seed)
    orders = rng.integers(min_n, max_n + 1, size=count).tolist()
    return [random_small_graph(n, derive_seed(seed, "graph", i)) for i, n in enumerate(orders)]


def lemma_main_instances(
    count: int, seed: int, max_n: int = 9, max_delta: int = 4, max_attempts: int = 100_000
) -> List[Tuple[Graph, int]]:
    """Pairs (H, x) with d(x) = Δ(H), 3 <= Δ <= min(n-1, max_delta) and no
    (Δ+1)-clique in H. The degree cap keeps exhaustive (Δ+1)-colouring cheap."""
    instances: List[Tuple[Graph, int]] = []
    for attempt in range(max_attempts):
        if len(instances) >= count:
            break
        rng = make_rng(seed, stream=attempt)
        n = int(rng.integers(4, max_n + 1))
        h = random_small_graph(n, derive_seed(seed, "lemma", attempt))
        delta = h.max_degree
        if not 3 <= delta <= min(n - 1, max_delta) or has_clique(h, delta + 1):
            continue
        tops = [v for v in range(n) if h.degree(v) == delta]
        instances.append((h, tops[int(rng.integers(0, len(tops)))]))

    if len(instances) < count:
        logger.warning(f"Only {len(instances)} of {count} ratio-step instances found")
    return instances


def ext_sandwich_instance(seed: int, max_n: int = 8) -> Tuple[Graph, frozenset, PartialColouring, LinearOrder]:
    """A random graph, a random order σ, a suffix T of σ and a random proper
    (Δ+1)-colouring β of V \\ T built greedily along σ."""
    rng = make_rng(seed)
    n = int(rng.integers(1, max_n + 1))
    g = random_small_graph(n, derive_seed(seed, "sandwich"))
    k = g.max_degree + 1

    order = LinearOrder(rng.permutation(n).tolist())
    cut = int(rng.integers(0, n + 1))
    t = frozenset(order.order[cut:])

    beta = PartialColouring({}, k)
    for v in order.order[:cut]:
        blocked = {beta[u] for u in g.adjacency[v] if u in beta}
        free = [c for c in range(1, k + 1) if c not in blocked]
        beta = beta.extended(v, free[int(rng.integers(0, len(free)))])

    return g, t, beta, order


def ext_sandwich_instances(count: int, seed: int, max_n: int = 8) -> Iterator[Tuple[Graph, frozenset, PartialColouring, LinearOrder]]:
    for i in range(count):
        yield ext_sandwich_instance(derive_seed(seed, "sandwich", i), max_n)


def theorem1_corpus(n: int, seed: Optional[int] = None, samples: int = 10) -> List[Tuple[str, Graph]]:
    """Connected cubic graphs of order n: exhaustive for n <= 10, otherwise
    random regular samples plus the lifts of K_4 when 4 | n. Lifts with at
    most three copies per fiber are enumerated in full, larger ones sampled."""
    if n <= MAX_CUBIC_ORDER:
        return [(f"cubic-{n}-{i}", g) for i, g in enumerate(cubic_graphs(n, connected_only=True))]
    if seed is None:
        raise InputError("Sampled corpora need a seed")

    corpus = []
    for i in range(samples):
        g = random_regular(n, 3, derive_seed(seed, "regular", n, i))
        if is_connected(g):
            corpus.append((f"regular-{n}-{i}", g))
    if n % 4 == 0 and n // 4 <= MAX_LIFT_FIBERS:
        corpus.extend((f"lift-{n}-{i}", g) for i, g in enumerate(lift_graphs(3, n // 4, connected_only=True)))
    elif n % 4 == 0:
        for i in range(samples):
            g = random_lift(3, n // 4, derive_seed(seed, "lift", n, i))
            if is_connected(g):
                corpus.append((f"lift-{n}-{i}", g))
    return corpus

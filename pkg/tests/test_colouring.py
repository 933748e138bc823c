"""
Tests for colourings: predicates, exhaustive enumeration, extension counts
and the structure of frozen colourings.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import small_graphs
from recolor.core.colourings.colouring import (
    Colouring,
    LinearOrder,
    PartialColouring,
    all_colourings,
    colour_set_at_distance_two,
    count_colourings,
    enumerate_colourings,
    ext,
    ext_degree,
    ext_frugal,
    first_colouring,
    frozen_class_partition_check,
    frozen_structure_check,
    greedy_colouring,
    is_frozen,
    is_frugal,
    is_proper,
    permute_module_colours,
)
from recolor.core.data.corpus import ext_sandwich_instance
from recolor.core.graphs.constructions import (
    build_J,
    canonical_frozen_of_J,
    complete_bipartite,
    complete_graph,
    j_vertex,
    path_graph,
    star_graph,
)
from recolor.core.graphs.graph_core import build_graph
from recolor.core.utils.errors import BudgetExceededError, InputError


def test_clique_colourings_are_all_frozen(k4):
    assert count_colourings(k4, 4) == 24
    assert count_colourings(k4, 4, "frozen") == 24


def test_cycle_counts(c6):
    assert count_colourings(c6, 3) == 66
    assert count_colourings(c6, 3, "frugal") == 6
    assert count_colourings(c6, 3, "frozen") == 6


def test_small_counts():
    assert count_colourings(path_graph(3), 3) == 12
    assert count_colourings(complete_bipartite(3, 3), 4) == 420
    assert count_colourings(build_graph(0, []), 2) == 1
    assert count_colourings(complete_graph(3), 2) == 0


def test_frozen_filter_needs_delta_plus_one(c6):
    with pytest.raises(InputError):
        count_colourings(c6, 4, "frozen")
    with pytest.raises(InputError):
        count_colourings(c6, 3, "rainbow")


def test_enumeration_streams_every_colouring(c6):
    seen = []
    result = enumerate_colourings(c6, 3, "frozen", on_colouring=seen.append)
    assert result.count == len(seen) == 6
    assert all(is_frozen(c6, Colouring(state, 3)) for state in seen)


def test_parallel_enumeration_matches_serial(c6):
    assert enumerate_colourings(c6, 3, workers=2).count == 66


def test_budget_exhaustion_carries_partial_count(k4):
    with pytest.raises(BudgetExceededError) as info:
        count_colourings(k4, 4, max_nodes=10)
    assert "count" in info.value.partial


def test_predicates():
    p3 = path_graph(3)
    assert is_proper(p3, Colouring([1, 2, 1], 3))
    assert not is_proper(p3, Colouring([1, 1, 2], 3))
    assert not is_frugal(p3, Colouring([1, 2, 1], 3))
    assert is_frugal(p3, Colouring([1, 2, 3], 3))
    with pytest.raises(InputError):
        is_frugal(p3, Colouring([1, 1, 2], 3))


def test_is_frozen_checks_palette(c6):
    with pytest.raises(InputError):
        is_frozen(c6, Colouring([1, 2, 3, 1, 2, 3], 4))
    assert is_frozen(c6, Colouring([1, 2, 3, 1, 2, 3], 3))
    assert not is_frozen(c6, Colouring([1, 2, 1, 2, 1, 3], 3))


def test_colouring_rejects_out_of_palette():
    with pytest.raises(InputError):
        Colouring([0, 1], 2)
    with pytest.raises(InputError):
        PartialColouring({0: 3}, 2)


def test_partial_colouring_extended_leaves_original_untouched(c6):
    base = PartialColouring({0: 1}, 3)
    grown = base.extended(1, 2)
    assert grown.domain == frozenset({0, 1}) and base.domain == frozenset({0})
    assert grown[1] == 2 and grown.k == 3
    assert grown.is_proper_on(c6)
    assert not base.extended(1, 1).is_proper_on(c6)
    with pytest.raises(InputError):
        base.extended(2, 4)


def test_greedy_and_first_colouring(j2):
    a = greedy_colouring(j2, 4)
    assert is_proper(j2, a)
    frozen = first_colouring(j2, 4, "frozen")
    assert frozen is not None and is_frozen(j2, frozen)
    assert first_colouring(complete_bipartite(3, 3), 4, "frozen") is None


def test_ext_counts():
    triangle = complete_graph(3)
    assert ext(triangle, {1, 2}, PartialColouring({0: 1}, 3)) == 2
    p3 = path_graph(3)
    assert ext(p3, {2}, PartialColouring({0: 1, 1: 2}, 3)) == 2
    star = star_graph(3)
    beta = PartialColouring({1: 1, 2: 2, 3: 3}, 4)
    assert ext_frugal(star, {0}, beta) == 1
    assert ext_frugal(star, {0}, PartialColouring({1: 1, 2: 1, 3: 3}, 4)) == 0


def test_ext_degree_counts(k4):
    assert ext_degree(complete_graph(3), {1, 2}, LinearOrder.identity(3)) == 2
    assert ext_degree(k4, {0, 1, 2, 3}, LinearOrder.identity(4)) == 24
    assert ext_degree(k4, {1, 2, 3}, LinearOrder.identity(4)) == 6


def test_ext_rejects_bad_bases():
    p3 = path_graph(3)
    with pytest.raises(InputError):
        ext(p3, {2}, PartialColouring({0: 1}, 3))
    with pytest.raises(InputError):
        ext(p3, {2}, PartialColouring({0: 1, 1: 1}, 3))


def test_suffix_order():
    order = LinearOrder.suffix_order(6, {1, 4}, np.random.default_rng(0))
    assert order.is_suffix({1, 4})
    assert set(order.order[-2:]) == {1, 4}
    with pytest.raises(InputError):
        LinearOrder([0, 0, 1])


def test_colour_set_at_distance_two(c6):
    beta = PartialColouring({1: 2, 2: 3, 4: 1, 5: 2, 3: 1}, 3)
    assert colour_set_at_distance_two(c6, 0, beta) == frozenset({3, 1})
    with pytest.raises(InputError):
        colour_set_at_distance_two(c6, 0, PartialColouring({1: 2}, 3))


def test_permuting_module_colours_keeps_frozen():
    g = build_J(3, 3)
    a = canonical_frozen_of_J(3, 3)
    module = {j_vertex(1, 1, 3), j_vertex(1, 2, 3)}
    b = permute_module_colours(g, a, module, {2: 3, 3: 2})
    assert b != a
    assert is_frozen(g, b)
    with pytest.raises(InputError):
        permute_module_colours(g, a, module, {2: 4, 4: 2})


def test_frozen_structure_of_J():
    g = build_J(4, 3)
    a = canonical_frozen_of_J(4, 3)
    assert frozen_structure_check(g, a) == {"regular": True, "equal_classes": True, "perfect_matchings": True}
    assert all(frozen_class_partition_check(g, a, c) for c in range(1, 5))


@settings(max_examples=40, deadline=None)
@given(small_graphs(max_n=6))
def test_frozen_and_frugal_coincide_on_regular_graphs(g):
    k = g.max_degree + 1
    frozen = set(all_colourings(g, k, "frozen"))
    frugal = set(all_colourings(g, k, "frugal"))
    assert frozen <= frugal
    if g.is_regular():
        assert frozen == frugal


@settings(max_examples=40, deadline=None)
@given(small_graphs(max_n=5), st.data())
def test_recolouring_a_free_vertex_stays_proper(g, data):
    k = g.max_degree + 1
    a = greedy_colouring(g, k)
    v = data.draw(st.integers(min_value=0, max_value=g.n - 1))
    free = [c for c in range(1, k + 1) if all(a[u] != c for u in g.adjacency[v])]
    assert free
    assert is_proper(g, a.recoloured(v, data.draw(st.sampled_from(free))))


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=2**63))
def test_extension_sandwich(seed):
    g, t, beta, sigma = ext_sandwich_instance(seed, max_n=7)
    assert sigma.is_suffix(t)
    assert ext_frugal(g, t, beta) <= ext_degree(g, t, sigma, k=beta.k) <= ext(g, t, beta)

"""
Tests for recolouring graphs: isolated states, component structure, the
non-frozen diameter and export.
"""

import json

import pytest
from hypothesis import given, settings

from conftest import small_graphs
from recolor.core.colourings.colouring import count_colourings
from recolor.core.colourings.reconfiguration import (
    build_recolouring_graph,
    component_summary,
    export_recolouring_graph,
    nonfrozen_diameter,
)
from recolor.core.data.graph_files import load_graph
from recolor.core.graphs.constructions import complete_bipartite
from recolor.core.utils.errors import StructureError


def test_clique_recolouring_graph_has_no_edges(k4):
    rg = build_recolouring_graph(k4, 4)
    assert len(rg) == 24
    assert rg.edge_count == 0
    summary = component_summary(rg)
    assert summary.isolated_count == 24
    assert summary.nontrivial_components == []


def test_graph_without_frozen_colourings_is_one_component():
    summary = component_summary(build_recolouring_graph(complete_bipartite(3, 3), 4))
    assert summary.states == 420
    assert summary.isolated_count == 0
    assert summary.nontrivial_components == [420]


def test_single_edge_gives_a_hexagon(p2):
    rg = build_recolouring_graph(p2, 3)
    assert len(rg) == 6
    assert all(rg.degree(i) == 2 for i in range(6))
    assert rg.component_of(0) == frozenset(range(6))
    assert nonfrozen_diameter(rg) == 3


def test_diameter_needs_a_single_nontrivial_component(k4):
    with pytest.raises(StructureError):
        nonfrozen_diameter(build_recolouring_graph(k4, 4))


def test_isolated_states_of_J_are_its_frozen_colourings(j2):
    rg = build_recolouring_graph(j2, 4)
    summary = component_summary(rg)
    assert summary.isolated_count == count_colourings(j2, 4, "frozen")
    assert len(summary.nontrivial_components) == 1
    assert all(rg.colouring(i).colours == rg.states[i] for i in rg.isolated())


def test_parallel_scan_matches_serial(c6):
    serial = build_recolouring_graph(c6, 3)
    parallel = build_recolouring_graph(c6, 3, workers=2)
    assert serial.states == parallel.states
    assert serial.adjacency == parallel.adjacency


def test_export_writes_graph_and_states(tmp_path, p2):
    rg = build_recolouring_graph(p2, 3)
    path = str(tmp_path / "meta.txt")
    sidecar = export_recolouring_graph(rg, path)

    meta, provenance = load_graph(path)
    assert meta.n == 6 and meta.m == 6
    assert provenance["family"] == "recolouring-graph"
    with open(sidecar) as f:
        states = json.load(f)
    assert states["k"] == 3
    assert len(states["states"]) == 6


@settings(max_examples=30, deadline=None)
@given(small_graphs(max_n=5))
def test_meta_edges_change_exactly_one_vertex(g):
    k = g.max_degree + 1
    rg = build_recolouring_graph(g, k)
    for i, j in rg.edges:
        assert sum(a != b for a, b in zip(rg.states[i], rg.states[j])) == 1
        assert i in rg.neighbours(j)
    assert len(rg.isolated()) == count_colourings(g, k, "frozen")

"""
Shared fixtures and graph strategies for the recolouring test suite.
"""

from itertools import combinations

import pytest
from hypothesis import strategies as st

from recolor.core.graphs.constructions import build_J, complete_graph, cycle_graph, path_graph
from recolor.core.graphs.graph_core import build_graph
from recolor.core.utils.config import Config


@st.composite
def small_graphs(draw, min_n: int = 1, max_n: int = 6):
    """Arbitrary simple graphs on up to max_n vertices."""
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    pairs = list(combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return build_graph(n, chosen)


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def c6():
    return cycle_graph(6)


@pytest.fixture
def p2():
    return path_graph(2)


@pytest.fixture
def j2():
    return build_J(2, 3)


@pytest.fixture(autouse=True)
def restore_budgets():
    """Tests that shrink budgets must not leak them into later tests."""
    saved = {
        name: getattr(Config, name)
        for name in ("ENUMERATION_NODE_BUDGET", "CHAIN_STEP_BUDGET", "WALL_SECONDS_BUDGET")
    }
    yield
    for name, value in saved.items():
        setattr(Config, name, value)

"""
Tests for Glauber dynamics: the step rule, seeded reproducibility, level-set
escape, Monte-Carlo estimates, stationary probabilities and exact mixing.
"""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import small_graphs
from recolor.core.colourings.colouring import Colouring, greedy_colouring, is_proper
from recolor.core.colourings.reconfiguration import build_recolouring_graph
from recolor.core.dynamics.glauber import (
    Always,
    Chain,
    IsFrozen,
    Never,
    OutsideLevelSet,
    VertexHasColour,
    binomial_ci95,
    escape_time,
    escape_times,
    event_probability_estimate,
    exact_tv_profile,
    geometric_escape_lower_tail,
    mixing_time,
    sample_colouring,
    stationary_event_probability,
    step,
    total_variation,
    total_variation_by_events,
    transition_matrix,
    tv_profile_from_kernel,
)
from recolor.core.graphs.constructions import JTag, beta_start, path_graph
from recolor.core.utils.config import Config
from recolor.core.utils.errors import BudgetExceededError, InputError, ReducibleChainError, StructureError, UnsupportedError


def test_chain_rejects_bad_starts(p2):
    with pytest.raises(InputError):
        Chain(p2, 3, Colouring([1, 1], 3), seed=0)
    with pytest.raises(InputError):
        Chain(p2, 3, Colouring([1, 2], 4), seed=0)


def test_step_rule(p2):
    chain = Chain(p2, 3, Colouring([1, 2], 3), seed=0)
    assert not chain.propose(0, 1)
    assert not chain.propose(0, 2)
    assert chain.propose(0, 3)
    assert chain.state == [3, 2]
    assert chain.steps == 3


def test_same_seed_same_trajectory(c6):
    start = greedy_colouring(c6, 3)
    first = Chain(c6, 3, start, seed=42, stream=3).run(500)
    second = Chain(c6, 3, start, seed=42, stream=3).run(500)
    assert first.state == second.state
    assert step(first).steps == 501


def test_frozen_start_never_moves(k4):
    start = Colouring([1, 2, 3, 4], 4)
    chain = Chain(k4, 4, start, seed=1).run(200)
    assert chain.colouring == start


def test_step_budget_is_enforced(c6):
    chain = Chain(c6, 3, greedy_colouring(c6, 3), seed=0, max_steps=10)
    with pytest.raises(BudgetExceededError):
        chain.run(11)


@settings(max_examples=40, deadline=None)
@given(small_graphs(max_n=6), st.integers(min_value=0, max_value=2**32))
def test_chain_stays_proper(g, seed):
    k = g.max_degree + 1
    chain = Chain(g, k, greedy_colouring(g, k), seed).run(200)
    assert is_proper(g, chain.colouring)


def test_escape_times_are_non_decreasing():
    g, beta = beta_start(5, 3)
    tag = JTag(k_level=5, delta=3)
    times = escape_times(Chain(g, 4, beta, seed=7, max_steps=10**6), tag)
    assert len(times) == 5
    assert times == sorted(times)
    assert times[0] >= 1


def test_escape_time_of_single_level_matches_trajectory():
    g, beta = beta_start(5, 3)
    tag = JTag(k_level=5, delta=3)
    single = escape_time(Chain(g, 4, beta, seed=3, max_steps=10**6), 1, tag)
    assert single == escape_times(Chain(g, 4, beta, seed=3, max_steps=10**6), tag)[0]


def test_escape_budget_reports_partial_times():
    g, beta = beta_start(5, 3)
    with pytest.raises(BudgetExceededError) as info:
        escape_times(Chain(g, 4, beta, seed=0, max_steps=5), JTag(k_level=5, delta=3))
    assert info.value.partial["steps"] == 5
    assert len(info.value.partial["escape_times"]) < 5


def test_escape_needs_matching_graph(p2):
    with pytest.raises(InputError):
        escape_time(Chain(p2, 3, Colouring([1, 2], 3), seed=0), 1, JTag(k_level=5, delta=3))


def test_geometric_escape_lower_tail():
    assert geometric_escape_lower_tail(5, 1.0) == pytest.approx(1.0)
    assert geometric_escape_lower_tail(5, 0.25) < 1.0
    with pytest.raises(InputError):
        geometric_escape_lower_tail(5, 0.0)


def test_events():
    g, beta = beta_start(5, 3)
    tag = JTag(k_level=5, delta=3)
    assert not OutsideLevelSet(tag, 5)(beta.colours)
    assert VertexHasColour(0, 4)(beta.colours)
    assert not IsFrozen(g, 4)(beta.colours)
    assert Always()(beta.colours) and not Never()(beta.colours)


def test_event_estimates_are_exact_for_trivial_events(c6):
    start = greedy_colouring(c6, 3)
    always = event_probability_estimate(c6, 3, start, 20, Always(), trials=50, seed=1)
    never = event_probability_estimate(c6, 3, start, 20, Never(), trials=50, seed=1)
    assert always.estimate == 1.0
    assert always.ci95[1] == pytest.approx(1.0) and always.ci95[0] < 1.0
    assert never.estimate == 0.0 and never.hits == 0


def test_event_estimate_does_not_depend_on_workers(c6):
    start = greedy_colouring(c6, 3)
    event = VertexHasColour(0, 1)
    serial = event_probability_estimate(c6, 3, start, 30, event, trials=40, seed=9)
    parallel = event_probability_estimate(c6, 3, start, 30, event, trials=40, seed=9, workers=2)
    assert serial.hits == parallel.hits


def test_event_estimate_validates_input(c6):
    with pytest.raises(InputError):
        event_probability_estimate(c6, 3, greedy_colouring(c6, 3), 10, Always(), trials=0, seed=0)


def test_binomial_interval():
    low, high = binomial_ci95(0, 10)
    assert low == pytest.approx(0.0, abs=1e-12) and 0.0 < high < 0.35
    low, high = binomial_ci95(50, 100)
    assert low < 0.5 < high


def test_stationary_probabilities(c6, p2):
    assert stationary_event_probability(c6, 3, IsFrozen(c6, 3), restrict="all") == Fraction(1, 11)
    assert stationary_event_probability(c6, 3, IsFrozen(c6, 3), restrict="nonfrozen") == 0
    assert stationary_event_probability(p2, 3, VertexHasColour(0, 1), restrict="all") == Fraction(1, 3)


def test_stationary_vertex_colour_symmetry_on_J(j2):
    exact = stationary_event_probability(j2, 4, VertexHasColour(0, 1), restrict="nonfrozen")
    assert exact == Fraction(1, 4)


def test_stationary_fallbacks(k4):
    assert stationary_event_probability(k4, 4, VertexHasColour(0, 2), max_nodes=5) == Fraction(1, 4)
    with pytest.raises(UnsupportedError):
        stationary_event_probability(k4, 4, IsFrozen(k4, 4), max_nodes=5)
    with pytest.raises(UnsupportedError):
        stationary_event_probability(k4, 4, Always(), restrict="nonfrozen")


def test_total_variation():
    half = Fraction(1, 2)
    assert total_variation([half, half], [1, 0]) == half
    assert total_variation([0.2, 0.8], [0.5, 0.5]) == pytest.approx(0.3)
    mu = [Fraction(1, 6)] * 6
    nu = [Fraction(1, 2), 0, 0, Fraction(1, 2), 0, 0]
    assert total_variation_by_events(mu, nu) == total_variation(mu, nu)


def test_transition_matrix_of_single_edge(p2):
    P, kept = transition_matrix(build_recolouring_graph(p2, 3))
    assert kept == list(range(6))
    assert np.allclose(P, P.T)
    assert np.allclose(P.sum(axis=1), 1.0)
    assert np.allclose(np.diag(P), 4 / 6)


def test_nonfrozen_kernel_of_cycle_is_reversible(c6):
    P, kept = transition_matrix(build_recolouring_graph(c6, 3), restrict="nonfrozen")
    assert len(kept) == 60
    assert np.allclose(P, P.T)
    assert np.allclose(P.sum(axis=1), 1.0)
    assert (P >= 0).all()


def test_transition_matrix_size_cap(p2, monkeypatch):
    monkeypatch.setattr(Config, "MAX_DENSE_STATES", 5)
    with pytest.raises(UnsupportedError):
        transition_matrix(build_recolouring_graph(p2, 3))


def test_exact_profile_of_single_edge(p2):
    profile = exact_tv_profile(p2, 3, t_max=50)
    assert profile.states == 6
    assert profile.d[0] == pytest.approx(5 / 6)
    assert all(b <= a + 1e-12 for a, b in zip(profile.d, profile.d[1:]))
    assert profile.t_mix_at["0.25"] == mixing_time(p2, 3, 0.25)


def test_profile_rejects_kernel_that_is_not_stochastic():
    with pytest.raises(StructureError):
        tv_profile_from_kernel(np.array([[2.0, 0.0], [0.0, 2.0]]), t_max=3)


def test_profile_from_kernel_of_lazy_coin():
    profile = tv_profile_from_kernel(np.array([[0.75, 0.25], [0.25, 0.75]]), t_max=2, epsilons=(0.2,))
    assert profile.d == pytest.approx([0.5, 0.25, 0.125])
    assert profile.t_mix_at == {"0.2": 2}


def test_profile_refuses_reducible_chain(c6):
    with pytest.raises(ReducibleChainError) as info:
        exact_tv_profile(c6, 3, t_max=5)
    assert info.value.component_count > 1


def test_profile_on_path_without_frozen_states():
    p3 = path_graph(3)
    every = exact_tv_profile(p3, 3, t_max=30)
    nonfrozen = exact_tv_profile(p3, 3, t_max=30, restrict="nonfrozen")
    assert every.states == nonfrozen.states == 12
    assert every.d == pytest.approx(nonfrozen.d)


def test_sample_colouring_is_proper(c6):
    assert is_proper(c6, sample_colouring(c6, 300, seed=4))


def test_binomial_interval_is_wilson():
    low, high = binomial_ci95(0, 500)
    assert 0.0 < high < 0.01
    low, high = binomial_ci95(20, 100)
    assert low == pytest.approx(0.1334, abs=1e-3)
    assert high == pytest.approx(0.2888, abs=1e-3)
    with pytest.raises(InputError):
        binomial_ci95(0, 0)

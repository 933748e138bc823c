"""
Tests for configuration and the shared helpers: budgets, rejection retries,
seeds, work splitting and the process-pool map.
"""

from fractions import Fraction

import pytest

from recolor.core.utils.config import Config
from recolor.core.utils.errors import BudgetExceededError
from recolor.core.utils.helpers import (
    RejectedSample,
    WorkBudget,
    chunk_range,
    derive_seed,
    fraction_str,
    make_rng,
    parallel_map,
    retry_on_rejection,
)


def test_get_budget_reads_current_values(monkeypatch):
    assert Config.get_budget("nodes") == Config.ENUMERATION_NODE_BUDGET
    assert Config.get_budget("STEPS") == Config.CHAIN_STEP_BUDGET
    assert Config.get_budget("colours") is None

    monkeypatch.setattr(Config, "WALL_SECONDS_BUDGET", 0)
    assert Config.get_budget("seconds") is None
    monkeypatch.setattr(Config, "WALL_SECONDS_BUDGET", 2.5)
    assert Config.get_budget("seconds") == 2.5


def test_validate_config(monkeypatch):
    assert Config.validate_config()
    monkeypatch.setattr(Config, "WORKERS", 0)
    assert not Config.validate_config()


def test_retry_on_rejection_redraws_until_accepted():
    calls = []

    @retry_on_rejection(max_attempts=5)
    def sampler():
        calls.append(1)
        if len(calls) < 3:
            raise RejectedSample
        return len(calls)

    assert sampler() == 3


def test_retry_on_rejection_gives_up():
    @retry_on_rejection(max_attempts=4)
    def sampler():
        raise RejectedSample

    with pytest.raises(BudgetExceededError) as info:
        sampler()
    assert info.value.partial == {"attempts": 4}


def test_work_budget_caps_units():
    budget = WorkBudget(3, label="nodes")
    budget.record(3)
    assert budget.can_continue()
    with pytest.raises(BudgetExceededError):
        budget.record()
    assert not budget.can_continue()
    assert WorkBudget(None).can_continue()


def test_chunk_range_covers_the_range():
    assert chunk_range(10, 3) == [(0, 4), (4, 7), (7, 10)]
    assert chunk_range(2, 5) == [(0, 1), (1, 2)]
    assert chunk_range(0, 4) == []


def test_parallel_map_keeps_order():
    assert parallel_map(abs, [-3, 2, -1]) == [3, 2, 1]
    assert parallel_map(abs, [-3, 2, -1], workers=2) == [3, 2, 1]
    assert parallel_map(abs, [], workers=2) == []


def test_seeds_and_generators_are_reproducible():
    assert derive_seed(7, "scan", 8) == derive_seed(7, "scan", 8)
    assert derive_seed(7, "scan", 8) != derive_seed(7, "scan", 9)
    assert make_rng(5, stream=1).integers(0, 10**9) == make_rng(5, stream=1).integers(0, 10**9)


def test_fraction_str():
    assert fraction_str(Fraction(6, 7)) == "6/7"
    assert fraction_str(Fraction(4, 2)) == "2"
    assert fraction_str(None) is None

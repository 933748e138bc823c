"""
Tests for the experiment and verification tools.
"""

import pytest

from recolor.core.data.exports import all_satisfied, replayable
from recolor.core.data.graph_files import load_colouring, load_graph, save_graph
from recolor.core.tools import Budgets, ExperimentConfig, experiment_tools, verification_tools
from recolor.core.utils.config import Config


def run(command, seed=1, budgets=None, **params):
    experiment = ExperimentConfig(command=command, params=params, seed=seed, budgets=budgets or Budgets())
    payload, series = experiment_tools.run(experiment)
    return payload, series


def test_enumerate_J():
    payload, _ = run("enumerate", family="J", l=2, delta=3)
    assert payload["status"] == "ok"
    result = payload["result"]
    assert result["counts"] == {"all": 1344, "frugal": 48, "frozen": 48}
    assert result["ratio"] == "1/28"
    assert result["theorem1_bound"] == "36/49"
    assert all_satisfied(payload)


def test_enumerate_graph_file(tmp_path, k4):
    path = str(tmp_path / "k4.txt")
    save_graph(k4, path)
    payload, _ = run("enumerate", graph=path, k=4)
    assert payload["result"]["counts"] == {"all": 24, "frugal": 24, "frozen": 24}
    assert payload["verdicts"] == []


def test_enumerate_cycle_with_other_palette():
    payload, _ = run("enumerate", family="cycle", n=6, k=4)
    assert payload["result"]["counts"]["frozen"] is None
    assert payload["result"]["ratio"] is None


def test_recolouring_graph_command():
    payload, _ = run("recolouring-graph", family="path", n=2, k=3)
    result = payload["result"]
    assert result["summary"]["nontrivial_components"] == [6]
    assert result["nonfrozen_diameter"] == 3
    assert all_satisfied(payload)


def test_recolouring_graph_export(tmp_path):
    path = str(tmp_path / "meta.txt")
    payload, _ = run("recolouring-graph", family="complete", n=3, export=path)
    assert payload["result"]["edges"] == 0
    assert payload["result"]["nonfrozen_diameter"] is None
    assert load_graph(path)[0].n == 6


def test_exact_mixing_command():
    payload, series = run("mixing", family="path", n=2, k=3, t_max=20)
    assert payload["status"] == "ok"
    assert payload["result"]["profile"]["d"][0] == pytest.approx(5 / 6)
    assert list(series.columns) == ["t", "d"]
    assert len(series) == 21


def test_lowerbound_refuses_small_levels():
    payload, _ = run("mixing", mode="lowerbound", k_level=4, delta=3)
    assert payload["status"] == "failed"
    assert "k_level >= 5" in payload["result"]["error"]


def test_construct_writes_files(tmp_path):
    graph_path = str(tmp_path / "j2.txt")
    colouring_path = str(tmp_path / "j2.col")
    payload, _ = run("construct", family="J", l=2, delta=3, graph_out=graph_path, colouring_out=colouring_path)
    assert all_satisfied(payload)
    g, provenance = load_graph(graph_path)
    assert g.n == 8 and provenance["family"] == "J" and provenance["seed"] == 1
    assert load_colouring(colouring_path).k == 4
    assert payload["result"]["labels"][0] == "v_1^1"


def test_construct_beta_is_not_frozen():
    payload, _ = run("construct", family="beta", k_level=5, delta=3)
    names = {v["name"]: v["satisfied"] for v in payload["verdicts"]}
    assert names == {"colouring_proper": True, "not_frozen": True}
    assert payload["result"]["frozen"] is False


def test_construct_without_distinguished_colouring():
    payload, _ = run("construct", family="bipartite", a=3, b=3)
    assert payload["result"]["colouring"] is None
    assert payload["verdicts"] == []


def test_unknown_family_and_command():
    assert run("enumerate", family="petersen")[0]["status"] == "failed"
    assert run("enumerate")[0]["status"] == "failed"
    assert run("plot")[0]["status"] == "failed"


def test_budget_exhaustion_is_partial_and_restored():
    before = Config.ENUMERATION_NODE_BUDGET
    payload, _ = run("enumerate", family="J", l=3, delta=3, budgets=Budgets(nodes=10))
    assert payload["status"] == "partial"
    assert "count" in payload["result"]["partial"]
    assert Config.ENUMERATION_NODE_BUDGET == before


def test_random_regular_scan():
    payload, series = run("random-regular-scan", orders=[4, 6, 5], trials=5)
    rows = {row["n"]: row for row in payload["result"]["rows"]}
    assert set(rows) == {4, 6}
    assert rows[4]["frequency"] == 1.0
    assert rows[6]["frequency"] == 0.0
    assert all_satisfied(payload)
    assert list(series["n"]) == [4, 6]


def test_girth_hunt(tmp_path):
    payload, _ = run("girth-hunt", delta=3, girth=3, copies=5)
    assert payload["result"]["trials"] == 1
    assert payload["result"]["limit_probability"] == 1.0

    graph_path = str(tmp_path / "witness.txt")
    payload, _ = run("girth-hunt", delta=3, girth=4, copies=20, graph_out=graph_path, seed=5)
    assert payload["status"] == "ok"
    assert payload["result"]["girth"] >= 4
    assert all_satisfied(payload)
    assert load_graph(graph_path)[0].is_regular(3)


def test_girth_hunt_reports_failure_as_partial():
    payload, _ = run("girth-hunt", delta=3, girth=10, copies=2, max_trials=3)
    assert payload["status"] == "partial"
    assert payload["result"]["partial"]["failures"] == 3


def test_replay_is_deterministic():
    first, _ = run("enumerate", family="random-regular", n=8, seed=99)
    second, _ = run("enumerate", family="random-regular", n=8, seed=99)
    assert replayable(first) == replayable(second)


def test_seed_is_drawn_and_echoed():
    payload, _ = experiment_tools.run(ExperimentConfig(command="enumerate", params={"family": "path", "n": 2}))
    assert isinstance(payload["seed"], int)


def test_verify_command():
    payload, _ = run("verify", bound="lift_pair_count")
    assert payload["status"] == "ok"
    assert payload["verdicts"] == [{"name": "lift_pair_count", "satisfied": True, "instances": 1, "violations": 0}]


def test_verify_unknown_sweep():
    assert run("verify", bound="nonsense")[0]["status"] == "failed"


@pytest.mark.parametrize("name", ["frozen_count", "many_frozen", "unique_component", "greedy_upper"])
def test_verification_sweeps(name):
    outcome = verification_tools.verify(name, {}, seed=3)
    assert outcome["verdicts"][0]["satisfied"] is True


def test_claim2_sweep_on_small_graphs():
    outcome = verification_tools.verify("claim2", {"samples": 3}, seed=3)
    reports = outcome["result"]["claim2"]["reports"]
    assert outcome["verdicts"][0]["satisfied"] is True
    assert any(r["lift_detected"] for r in reports)
    assert any(not r["lift_detected"] for r in reports)


def test_small_sandwich_and_lemma_sweeps():
    sandwich = verification_tools.verify("ext_sandwich", {"count": 50, "max_n": 6}, seed=11)
    lemma = verification_tools.verify("lemma_main", {"count": 5, "max_n": 7}, seed=11)
    assert sandwich["verdicts"][0]["satisfied"] is True
    assert lemma["verdicts"][0]["satisfied"] is True


def test_greedy_upper_sweep_skips_disconnected_cubic_graphs():
    outcome = verification_tools.verify("greedy_upper", {"count": 20}, seed=1)
    reports = outcome["result"]["greedy_upper"]["reports"]
    assert outcome["verdicts"][0]["satisfied"] is True
    assert outcome["result"]["greedy_upper"]["undetermined"] == 0
    assert all(r["satisfied"] is True for r in reports)

"""
Tests for graph and colouring files, corpora and experiment payloads.
"""

import json
from fractions import Fraction

import pandas as pd
import pytest

from recolor.core.colourings.colouring import Colouring
from recolor.core.data.corpus import ext_sandwich_instances, lift_graphs, random_small_graphs, theorem1_corpus
from recolor.core.graphs.constructions import random_lift
from recolor.core.graphs.graph_core import is_connected, is_isomorphic
from recolor.core.data.exports import (
    all_satisfied,
    build_payload,
    replayable,
    series_frame,
    to_jsonable,
    verdict,
    write_json_lines,
    write_payload,
)
from recolor.core.data.graph_files import (
    format_graph,
    load_colouring,
    load_graph,
    parse_colouring,
    parse_graph,
    save_colouring,
    save_graph,
)
from recolor.core.utils.errors import InputError


def test_graph_text_round_trip(c6):
    text = format_graph(c6, provenance={"family": "cycle", "n": 6})
    g, provenance = parse_graph(text)
    assert g == c6
    assert provenance == {"family": "cycle", "n": 6}


def test_one_based_files_are_remapped():
    g, _ = parse_graph("# a path\n3 2\n1 2\n2 3\n")
    assert g.edges == frozenset({(0, 1), (1, 2)})
    zero_based, _ = parse_graph("3 2\n0 1\n1 2\n")
    assert zero_based == g


def test_malformed_graph_files():
    with pytest.raises(InputError):
        parse_graph("")
    with pytest.raises(InputError):
        parse_graph("3 2\n0 1\n")
    with pytest.raises(InputError):
        parse_graph("3 1\n0 x\n")
    with pytest.raises(InputError):
        parse_graph("# provenance: {not json\n1 0\n")


def test_graph_and_colouring_files(tmp_path, k4):
    path = str(tmp_path / "graphs" / "k4.txt")
    save_graph(k4, path, provenance={"family": "complete"})
    g, provenance = load_graph(path)
    assert g == k4 and provenance["family"] == "complete"

    a = Colouring([1, 2, 3, 4], 4)
    colouring_path = str(tmp_path / "k4.col")
    save_colouring(a, colouring_path)
    assert load_colouring(colouring_path, n=4) == a


def test_colouring_file_must_cover_every_vertex():
    with pytest.raises(InputError):
        parse_colouring("3\n0 1\n2 2\n")
    with pytest.raises(InputError):
        parse_colouring("3\n0 1\n1 2\n", n=3)


def test_corpora_are_pure_functions_of_the_seed():
    first = random_small_graphs(5, 6, seed=8)
    assert first == random_small_graphs(5, 6, seed=8)
    assert all(1 <= g.n <= 6 for g in first)

    sandwiches = list(ext_sandwich_instances(3, seed=4))
    again = list(ext_sandwich_instances(3, seed=4))
    assert [s[0] for s in sandwiches] == [s[0] for s in again]
    assert [s[1] for s in sandwiches] == [s[1] for s in again]


def test_sampled_theorem1_corpus_is_cubic():
    corpus = theorem1_corpus(12, seed=1, samples=3)
    assert corpus
    assert all(g.n == 12 and g.is_regular(3) for _, g in corpus)
    with pytest.raises(InputError):
        theorem1_corpus(12)


def test_lift_corpus_is_complete_up_to_isomorphism():
    lifts = lift_graphs(3, 3, connected_only=True)
    assert lifts
    assert all(g.n == 12 and g.is_regular(3) and is_connected(g) for g in lifts)
    assert not any(is_isomorphic(a, b) for i, a in enumerate(lifts) for b in lifts[i + 1:])
    for seed in range(10):
        g = random_lift(3, 3, seed)
        if is_connected(g):
            assert any(is_isomorphic(g, lift) for lift in lifts)


def test_twelve_vertex_corpus_contains_every_lift():
    corpus = theorem1_corpus(12, seed=1, samples=0)
    assert len(corpus) == len(lift_graphs(3, 3, connected_only=True))
    assert all(label.startswith("lift-12-") for label, _ in corpus)


def test_two_lifts_of_a_triangle():
    assert len(lift_graphs(2, 2)) == 2
    assert len(lift_graphs(2, 2, connected_only=True)) == 1


def test_to_jsonable():
    converted = to_jsonable({"ratio": Fraction(1, 11), "pair": (1, 2), "set": {3, 1}})
    assert converted == {"ratio": "1/11", "pair": [1, 2], "set": [1, 3]}


def test_payload_shape_and_replay(tmp_path):
    verdicts = [verdict("theorem1", True, ratio=Fraction(1, 28))]
    payload = build_payload("enumerate", 7, {"family": "J"}, "ok", {"count": 48}, verdicts, started=0.0)
    assert set(payload) == {"command", "seed", "params", "status", "result", "verdicts", "meta"}
    assert verdicts[0]["ratio"] == "1/28"
    assert all_satisfied(payload)
    assert "meta" not in replayable(payload)

    series = series_frame(t=[0, 1], d=[0.5, 0.25])
    written = write_payload(payload, str(tmp_path / "run.csv"), "csv", series)
    assert written == [str(tmp_path / "run.csv"), str(tmp_path / "run.json")]
    assert list(pd.read_csv(written[0])["d"]) == [0.5, 0.25]
    with open(written[1]) as f:
        assert json.load(f)["seed"] == 7

    with pytest.raises(ValueError):
        write_payload(payload, str(tmp_path / "run.xml"), "xml")


def test_undetermined_verdict_is_not_satisfied():
    payload = {"verdicts": [verdict("a", True), verdict("b", None)]}
    assert not all_satisfied(payload)


def test_json_lines(tmp_path):
    path = str(tmp_path / "reports.jsonl")
    write_json_lines([{"a": Fraction(1, 2)}, {"b": 2}], path)
    with open(path) as f:
        assert [json.loads(line) for line in f] == [{"a": "1/2"}, {"b": 2}]

"""
Verification Tools

Corpus sweeps that check the counting bounds and structural claims about
frozen colourings against exhaustive oracles. Each sweep returns its
per-instance reports plus one aggregated verdict.
"""

import logging
from typing import Any, Callable, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field

from recolor.core.bounds.bounds import BoundReport, verify_bound
from recolor.core.colourings.colouring import count_colourings, first_colouring
from recolor.core.colourings.reconfiguration import build_recolouring_graph, component_summary
from recolor.core.data.corpus import (
    cubic_graphs,
    ext_sandwich_instance,
    lemma_main_instances,
    random_small_graphs,
    theorem1_corpus,
)
from recolor.core.data.exports import to_jsonable, verdict
from recolor.core.graphs.constructions import build_J, build_lift, detect_lift_structure, random_lift_spec
from recolor.core.graphs.graph_core import Graph, is_connected, is_isomorphic
from recolor.core.utils.helpers import derive_seed, parallel_map

logger = logging.getLogger(__name__)


class SweepInput(BaseModel):
    """Parameters shared by the verification sweeps."""
    orders: List[int] = Field(default_factory=lambda: [8], description="Graph orders for corpus sweeps")
    count: Optional[int] = Field(default=None, description="Number of random instances")
    samples: int = Field(default=10, description="Random samples per order beyond the exhaustive range")
    max_n: Optional[int] = Field(default=None, description="Largest order of random instances")


def _verify_one(args) -> BoundReport:
    name, label, graph, params = args
    report = verify_bound(name, graph, **params)
    report.params["instance"] = label
    return report


def _sandwich_one(args) -> BoundReport:
    seed, index, max_n = args
    # same instance stream as corpus.ext_sandwich_instances
    graph, t, beta, sigma = ext_sandwich_instance(derive_seed(seed, "sandwich", index), max_n)
    report = verify_bound("ext_sandwich", graph, t=t, beta=beta, sigma=sigma)
    report.params["instance"] = index
    return report


def _component_check(args) -> Dict[str, Any]:
    label, graph = args
    k = graph.max_degree + 1
    summary = component_summary(build_recolouring_graph(graph, k))
    frozen = count_colourings(graph, k, "frozen")
    return {
        "instance": label,
        "n": graph.n,
        "delta": graph.max_degree,
        "states": summary.states,
        "isolated": summary.isolated_count,
        "frozen": frozen,
        "nontrivial_components": summary.nontrivial_components,
        "satisfied": len(summary.nontrivial_components) <= 1 and summary.isolated_count == frozen,
    }


def _lift_check(args) -> Dict[str, Any]:
    label, graph = args
    k = graph.max_degree + 1
    has_frozen = first_colouring(graph, k, "frozen") is not None if graph.n % k == 0 else False
    spec = detect_lift_structure(graph)
    round_trip = is_isomorphic(build_lift(spec), graph) if spec is not None else None
    return {
        "instance": label,
        "n": graph.n,
        "frozen_exists": has_frozen,
        "lift_detected": spec is not None,
        "round_trip": round_trip,
        "satisfied": has_frozen == (spec is not None) and round_trip is not False,
    }


class VerificationTools:
    """Collection of verification sweeps over desk-scale corpora."""

    def __init__(self):
        self.sweeps: Dict[str, Callable[[SweepInput, int, int], List[Any]]] = {
            "theorem1": self.sweep_theorem1,
            "theorem1_induction": self.sweep_theorem1_induction,
            "ext_sandwich": self.sweep_ext_sandwich,
            "lemma_main": self.sweep_lemma_main,
            "unique_component": self.sweep_unique_component,
            "frozen_count": self.sweep_frozen_count,
            "many_frozen": self.sweep_many_frozen,
            "lift_pair_count": self.sweep_lift_pair_count,
            "claim2": self.sweep_claim2,
            "greedy_upper": self.sweep_greedy_upper,
        }

    def _corpus(self, sweep: SweepInput, seed: int) -> List[Tuple[str, Graph]]:
        corpus = []
        for n in sweep.orders:
            corpus.extend(theorem1_corpus(n, seed=derive_seed(seed, "corpus"), samples=sweep.samples))
        return corpus

    def sweep_theorem1(self, sweep: SweepInput, seed: int, workers: int) -> List[BoundReport]:
        tasks = [("theorem1", label, g, {}) for label, g in self._corpus(sweep, seed)]
        return parallel_map(_verify_one, tasks, workers)

    def sweep_theorem1_induction(self, sweep: SweepInput, seed: int, workers: int) -> List[BoundReport]:
        tasks = [("theorem1_induction", label, g, {}) for label, g in self._corpus(sweep, seed)]
        tasks.append(("theorem1_induction", "J(2,3)", build_J(2, 3), {}))
        return parallel_map(_verify_one, tasks, workers)

    def sweep_ext_sandwich(self, sweep: SweepInput, seed: int, workers: int) -> List[BoundReport]:
        count = sweep.count or 10_000
        tasks = [(seed, i, sweep.max_n or 8) for i in range(count)]
        return parallel_map(_sandwich_one, tasks, workers)

    def sweep_lemma_main(self, sweep: SweepInput, seed: int, workers: int) -> List[BoundReport]:
        instances = lemma_main_instances(sweep.count or 100, seed, max_n=sweep.max_n or 9)
        tasks = [("lemma_main", f"instance-{i}", h, {"x": x}) for i, (h, x) in enumerate(instances)]
        return parallel_map(_verify_one, tasks, workers)

    def sweep_unique_component(self, sweep: SweepInput, seed: int, workers: int) -> List[Dict[str, Any]]:
        corpus = [(f"cubic-{n}-{i}", g) for n in (4, 6, 8) for i, g in enumerate(cubic_graphs(n))]
        corpus.append(("J(2,3)", build_J(2, 3)))
        return parallel_map(_component_check, corpus, workers)

    def sweep_frozen_count(self, sweep: SweepInput, seed: int, workers: int) -> List[BoundReport]:
        tasks = [("frozen_count", f"J({l},3)", None, {"l": l, "delta": 3}) for l in (2, 3)]
        return parallel_map(_verify_one, tasks, workers)

    def sweep_many_frozen(self, sweep: SweepInput, seed: int, workers: int) -> List[BoundReport]:
        tasks = [("many_frozen", f"J({l},3)", None, {"l": l, "delta": 3}) for l in (2, 3)]
        return parallel_map(_verify_one, tasks, workers)

    def sweep_lift_pair_count(self, sweep: SweepInput, seed: int, workers: int) -> List[BoundReport]:
        return [_verify_one(("lift_pair_count", "2-regular-6", None, {"n": 6, "delta": 2}))]

    def sweep_claim2(self, sweep: SweepInput, seed: int, workers: int) -> List[Dict[str, Any]]:
        corpus = [(f"cubic-{n}-{i}", g) for n in (4, 8) for i, g in enumerate(cubic_graphs(n))]
        for i in range(sweep.samples):
            spec = random_lift_spec(3, 2 + i % 3, derive_seed(seed, "claim2", i))
            corpus.append((f"lift-{i}", build_lift(spec)))
        return parallel_map(_lift_check, corpus, workers)

    def sweep_greedy_upper(self, sweep: SweepInput, seed: int, workers: int) -> List[BoundReport]:
        corpus = [(f"cubic-{n}-{i}", g) for n in (4, 6, 8) for i, g in enumerate(cubic_graphs(n, connected_only=True))]
        randoms = random_small_graphs(sweep.count or 50, sweep.max_n or 7, derive_seed(seed, "greedy"))
        corpus.extend((f"random-{i}", g) for i, g in enumerate(randoms) if is_connected(g))
        tasks = [("greedy_upper", label, g, {}) for label, g in corpus]
        return parallel_map(_verify_one, tasks, workers)

    def verify(self, name: str, params: Dict[str, Any], seed: int, workers: int = 1) -> Dict[str, Any]:
        """Run one sweep (or every sweep for name='all') and aggregate its verdicts."""
        try:
            names = list(self.sweeps) if name == "all" else [name]
            unknown = [n for n in names if n not in self.sweeps]
            if unknown:
                return {"error": f"Unknown sweep {unknown[0]!r}; expected one of {sorted(self.sweeps)} or 'all'"}

            sweep = SweepInput(**{key: value for key, value in params.items() if key in SweepInput.model_fields})
            results = {}
            verdicts = []
            for sweep_name in names:
                reports = [to_jsonable(r) for r in self.sweeps[sweep_name](sweep, seed, workers)]
                failed = [r for r in reports if r.get("satisfied") is False]
                open_ = [r for r in reports if r.get("satisfied") is None]
                satisfied = False if failed or not reports else (None if open_ else True)
                logger.info(f"Sweep {sweep_name}: {len(reports)} instances, {len(failed)} violations, {len(open_)} undetermined")
                results[sweep_name] = {"instances": len(reports), "violations": len(failed), "undetermined": len(open_), "reports": reports}
                verdicts.append(verdict(sweep_name, satisfied, instances=len(reports), violations=len(failed)))

            return {"result": results, "verdicts": verdicts}

        except Exception as e:
            logger.error(f"Error running verification {name}: {e}")
            return {"error": str(e)}


# Global instance
verification_tools = VerificationTools()

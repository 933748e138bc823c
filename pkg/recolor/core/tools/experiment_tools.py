"""
Experiment Tools

Named, replayable experiments binding the graph, colouring, dynamics and
bounds modules together. `ExperimentTools.run` turns an `ExperimentConfig`
into a payload {command, seed, params, status, result, verdicts, meta} plus an
optional plot-ready data series.
"""

import logging
import time
from contextlib import contextmanager
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from recolor.core.bounds.bounds import (
    empirical_cycle_mean,
    frozen_existence_log_ratio,
    girth_limit_probability,
    satisfies_theorem1,
    theorem1_bound,
)
from recolor.core.colourings.colouring import Colouring, count_colourings, first_colouring, is_frozen, is_proper
from recolor.core.colourings.reconfiguration import (
    build_recolouring_graph,
    component_summary,
    export_recolouring_graph,
    nonfrozen_diameter,
)
from recolor.core.data.exports import build_payload, series_frame, verdict
from recolor.core.data.graph_files import load_graph, save_colouring, save_graph
from recolor.core.dynamics.glauber import (
    Chain,
    OutsideLevelSet,
    VertexHasColour,
    binomial_ci95,
    escape_times,
    event_probability_estimate,
    exact_tv_profile,
    geometric_escape_lower_tail,
    stationary_event_probability,
)
from recolor.core.graphs.constructions import (
    JTag,
    LiftSpec,
    beta_start,
    build_J,
    build_lift,
    canonical_frozen_of_J,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    detect_lift_structure,
    empty_graph,
    j_label,
    j_vertex,
    path_graph,
    pullback_colouring,
    random_lift_spec,
    random_regular,
    star_graph,
)
from recolor.core.graphs.graph_core import Graph, girth, is_connected
from recolor.core.tools.verification_tools import verification_tools
from recolor.core.utils.config import Config, config
from recolor.core.utils.errors import BudgetExceededError, InputError, RecolorError, UnsupportedError
from recolor.core.utils.helpers import derive_seed, draw_seed, parallel_map

logger = logging.getLogger(__name__)

FAMILIES = ("complete", "cycle", "path", "star", "bipartite", "empty", "J", "beta", "lift", "random-lift", "random-regular")


class Budgets(BaseModel):
    """Hard caps applied for the duration of one experiment."""
    nodes: int = Field(default_factory=lambda: config.ENUMERATION_NODE_BUDGET, gt=0, description="Enumeration search nodes")
    steps: int = Field(default_factory=lambda: config.CHAIN_STEP_BUDGET, gt=0, description="Glauber steps per chain")
    seconds: float = Field(default_factory=lambda: config.WALL_SECONDS_BUDGET, ge=0, description="Wall seconds per search, 0 = unlimited")


class ExperimentConfig(BaseModel):
    """One experiment: a command, its parameters, a seed and budgets."""
    command: str = Field(description="Sub-command name")
    params: Dict[str, Any] = Field(default_factory=dict, description="Command parameters")
    seed: Optional[int] = Field(default=None, description="64-bit seed; drawn and echoed when absent")
    budgets: Budgets = Field(default_factory=Budgets, description="Budget overrides")
    output: Optional[str] = Field(default=None, description="Payload path")
    format: Literal["json", "csv"] = Field(default="json", description="Payload format")
    workers: int = Field(default_factory=lambda: config.WORKERS, ge=1, description="Worker processes")

    def resolved_seed(self) -> int:
        if self.seed is not None:
            return self.seed
        if config.SEED is not None:
            return config.SEED
        return draw_seed()


class GraphInput(BaseModel):
    """Graph source: a graph file or a named family with its parameters."""
    model_config = ConfigDict(extra="ignore")

    graph: Optional[str] = Field(default=None, description="Path of a graph file")
    family: Optional[str] = Field(default=None, description=f"One of {FAMILIES}")
    n: Optional[int] = Field(default=None, description="Order for complete/cycle/path/empty/random-regular, leaves for star")
    a: Optional[int] = Field(default=None, description="First side of complete bipartite")
    b: Optional[int] = Field(default=None, description="Second side of complete bipartite")
    l: Optional[int] = Field(default=None, description="Number of fibers of J(l)")
    k_level: Optional[int] = Field(default=None, description="k of J(2k) for the β start")
    delta: int = Field(default=3, description="Δ for J, lifts and random regular graphs")
    copies: Optional[int] = Field(default=None, description="Fiber size of a lift")
    matchings: Optional[List[List[int]]] = Field(default=None, description="Explicit lift matchings")


class EnumerateInput(GraphInput):
    k: Optional[int] = Field(default=None, description="Palette size, Δ+1 when absent")


class RecolouringGraphInput(GraphInput):
    k: Optional[int] = Field(default=None, description="Palette size, Δ+1 when absent")
    export: Optional[str] = Field(default=None, description="Write the meta-graph to this graph file")


class MixingInput(GraphInput):
    mode: Literal["exact", "lowerbound"] = Field(default="exact", description="Exact TV profile or the level-set experiment")
    k: Optional[int] = Field(default=None, description="Palette size, Δ+1 when absent")
    restrict: Literal["all", "nonfrozen"] = Field(default="all", description="State set for the exact profile")
    t_max: Optional[int] = Field(default=None, description="Profile horizon")
    epsilons: List[float] = Field(default_factory=lambda: [config.DEFAULT_EPSILON], description="Thresholds for t_mix")
    trials: int = Field(default=500, ge=1, description="Monte-Carlo trials")
    escape_runs: int = Field(default=20, ge=0, description="Trajectories for the τ_k distribution")


class ConstructInput(GraphInput):
    graph_out: Optional[str] = Field(default=None, description="Write the graph file here")
    colouring_out: Optional[str] = Field(default=None, description="Write the distinguished colouring here")


class ScanInput(BaseModel):
    model_config = ConfigDict(extra="ignore")

    orders: List[int] = Field(default_factory=lambda: [4, 6, 8, 12], description="Orders n to sample")
    delta: int = Field(default=3, description="Degree Δ")
    trials: int = Field(default=100, ge=1, description="Samples per order")


class GirthHuntInput(BaseModel):
    model_config = ConfigDict(extra="ignore")

    delta: int = Field(default=3, description="Degree Δ of the lift")
    girth: int = Field(default=4, ge=3, description="Target girth")
    copies: int = Field(default=20, ge=1, description="Fiber size k")
    max_trials: int = Field(default=10_000, ge=1, description="Trial budget")
    cycle_samples: int = Field(default=0, ge=0, description="Lifts sampled for empirical short-cycle means")
    graph_out: Optional[str] = Field(default=None, description="Write the witness graph here")
    colouring_out: Optional[str] = Field(default=None, description="Write the witness colouring here")


def _detect_sample(args) -> bool:
    n, delta, seed = args
    return detect_lift_structure(random_regular(n, delta, seed)) is not None


@contextmanager
def budget_overrides(budgets: Budgets):
    """Apply budgets to the global configuration, restoring the previous values on exit."""
    overrides = {
        "ENUMERATION_NODE_BUDGET": budgets.nodes,
        "CHAIN_STEP_BUDGET": budgets.steps,
        "WALL_SECONDS_BUDGET": budgets.seconds,
    }
    saved = {name: getattr(Config, name) for name in overrides}
    for name, value in overrides.items():
        setattr(Config, name, value)
    try:
        yield
    finally:
        for name, value in saved.items():
            setattr(Config, name, value)


class ExperimentTools:
    """Collection of experiment commands."""

    def __init__(self):
        self.commands = {
            "enumerate": self.cmd_enumerate,
            "recolouring-graph": self.cmd_recolouring_graph,
            "mixing": self.cmd_mixing,
            "construct": self.cmd_construct,
            "verify": self.cmd_verify,
            "random-regular-scan": self.cmd_random_regular_scan,
            "girth-hunt": self.cmd_girth_hunt,
        }

    def resolve_graph(self, source: GraphInput, seed: int) -> Tuple[Graph, Optional[Colouring], Dict[str, Any]]:
        """Load or build the input graph; returns (graph, distinguished colouring or None, description)."""
        if source.graph:
            g, provenance = load_graph(source.graph)
            return g, None, {"graph": source.graph, "provenance": provenance}

        family = source.family
        if family is None:
            raise InputError("Give a graph file or a family")
        delta = source.delta
        described: Dict[str, Any] = {"family": family}

        def need(name: str) -> int:
            value = getattr(source, name)
            if value is None:
                raise InputError(f"Family {family!r} needs --{name.replace('_', '-')}")
            described[name] = value
            return value

        colouring = None
        if family == "complete":
            g = complete_graph(need("n"))
        elif family == "cycle":
            g = cycle_graph(need("n"))
        elif family == "path":
            g = path_graph(need("n"))
        elif family == "star":
            g = star_graph(need("n"))
        elif family == "bipartite":
            g = complete_bipartite(need("a"), need("b"))
        elif family == "empty":
            g = empty_graph(need("n"))
        elif family == "J":
            l = need("l")
            g = build_J(l, delta)
            colouring = canonical_frozen_of_J(l, delta)
            described["delta"] = delta
        elif family == "beta":
            g, colouring = beta_start(need("k_level"), delta)
            described["delta"] = delta
        elif family == "lift":
            spec = LiftSpec(delta=delta, k=need("copies"), matchings=source.matchings or [])
            g, colouring = build_lift(spec), pullback_colouring(spec)
            described.update(delta=delta, matchings=spec.matchings)
        elif family == "random-lift":
            family_seed = derive_seed(seed, "family")
            spec = random_lift_spec(delta, need("copies"), family_seed)
            g, colouring = build_lift(spec), pullback_colouring(spec)
            described.update(delta=delta, family_seed=family_seed, matchings=spec.matchings)
        elif family == "random-regular":
            family_seed = derive_seed(seed, "family")
            g = random_regular(need("n"), delta, family_seed)
            described.update(delta=delta, family_seed=family_seed)
        else:
            raise InputError(f"Unknown family {family!r}; expected one of {FAMILIES}")

        return g, colouring, described

    def cmd_enumerate(self, params: Dict[str, Any], seed: int, workers: int) -> Tuple[Dict, List, Optional[pd.DataFrame]]:
        source = EnumerateInput(**params)
        g, _, described = self.resolve_graph(source, seed)
        delta = g.max_degree
        k = source.k or delta + 1

        counts: Dict[str, Optional[int]] = {
            "all": count_colourings(g, k, "all", workers=workers),
            "frugal": count_colourings(g, k, "frugal", workers=workers),
            "frozen": count_colourings(g, k, "frozen", workers=workers) if k == delta + 1 else None,
        }
        ratio = Fraction(counts["frozen"], counts["all"]) if counts["frozen"] is not None and counts["all"] else None

        bound = None
        verdicts = []
        if ratio is not None and 3 <= delta <= g.n - 2 and is_connected(g):
            bound = theorem1_bound(g.n, delta)
            verdicts.append(verdict("theorem1", satisfies_theorem1(ratio, g.n, delta), ratio=ratio, bound=bound))

        result = {"source": described, "n": g.n, "delta": delta, "k": k, "counts": counts, "ratio": ratio, "theorem1_bound": bound}
        return result, verdicts, None

    def cmd_recolouring_graph(self, params: Dict[str, Any], seed: int, workers: int) -> Tuple[Dict, List, Optional[pd.DataFrame]]:
        source = RecolouringGraphInput(**params)
        g, _, described = self.resolve_graph(source, seed)
        k = source.k or g.max_degree + 1

        rg = build_recolouring_graph(g, k, workers=workers)
        summary = component_summary(rg)
        try:
            diameter = nonfrozen_diameter(rg)
        except RecolorError as e:
            logger.warning(f"Diameter not available: {e}")
            diameter = None

        result = {
            "source": described,
            "n": g.n,
            "k": k,
            "summary": summary,
            "edges": rg.edge_count,
            "nonfrozen_diameter": diameter,
        }
        verdicts = [verdict("unique_nontrivial_component", len(summary.nontrivial_components) <= 1,
                            components=summary.nontrivial_components)]
        if k == g.max_degree + 1:
            frozen = count_colourings(g, k, "frozen")
            result["frozen"] = frozen
            verdicts.append(verdict("isolated_are_frozen", summary.isolated_count == frozen,
                                    isolated=summary.isolated_count, frozen=frozen))
        if source.export:
            result["export"] = {"graph": source.export, "states": export_recolouring_graph(rg, source.export)}
        return result, verdicts, None

    def cmd_mixing(self, params: Dict[str, Any], seed: int, workers: int) -> Tuple[Dict, List, Optional[pd.DataFrame]]:
        source = MixingInput(**params)
        if source.mode == "lowerbound":
            return self._mixing_lowerbound(source, seed, workers)

        g, _, described = self.resolve_graph(source, seed)
        k = source.k or g.max_degree + 1
        profile = exact_tv_profile(g, k, t_max=source.t_max, restrict=source.restrict, epsilons=source.epsilons)
        series = series_frame(t=range(len(profile.d)), d=profile.d)
        verdicts = [verdict("tv_non_increasing", all(b <= a + config.TV_TOLERANCE for a, b in zip(profile.d, profile.d[1:])))]
        return {"source": described, "n": g.n, "k": k, "profile": profile}, verdicts, series

    def _mixing_lowerbound(self, source: MixingInput, seed: int, workers: int) -> Tuple[Dict, List, Optional[pd.DataFrame]]:
        k_level = source.k_level
        delta = source.delta
        if k_level is None or k_level < 5 or delta < 3:
            raise InputError(f"The level-set experiment needs k_level >= 5 and Δ >= 3, got k_level={k_level}, Δ={delta}")

        g, beta = beta_start(k_level, delta)
        tag = JTag(k_level=k_level, delta=delta)
        k = delta + 1
        t = k_level * g.n // 4

        estimate = event_probability_estimate(g, k, beta, t, OutsideLevelSet(tag, k_level), source.trials, seed, workers=workers)
        # S_k pins a single vertex to colour 1
        pinned = VertexHasColour(j_vertex(k_level, 0, delta), 1)
        stationary_outside = 1 - stationary_event_probability(g, k, pinned, restrict="nonfrozen")
        tv_lower = float(stationary_outside) - estimate.ci95[1]

        taus = []
        for run in range(source.escape_runs):
            chain = Chain(g, k, beta, derive_seed(seed, "escape"), stream=run)
            taus.append(escape_times(chain, tag)[-1])
        hits = sum(1 for tau in taus if tau <= t)

        result = {
            "n": g.n,
            "delta": delta,
            "k_level": k_level,
            "t": t,
            "estimate": estimate,
            "stationary_outside": stationary_outside,
            "tv_lower_bound": tv_lower,
            "escape": {
                "tau_k": taus,
                "fraction_within_t": hits / len(taus) if taus else None,
                "ci95": binomial_ci95(hits, len(taus)) if taus else None,
                "geometric_lower_tail": geometric_escape_lower_tail(k_level, 1.0 / 4),
            },
        }
        verdicts = [
            verdict("estimate_below_half", estimate.estimate < 0.5, estimate=estimate.estimate),
            verdict("ci_upper_below_0.6", estimate.ci95[1] < 0.6, ci95=estimate.ci95),
            verdict("tv_above_quarter", tv_lower > 0.25, tv_lower_bound=tv_lower),
        ]
        series = series_frame(run=range(len(taus)), tau_k=taus)
        return result, verdicts, series

    def cmd_construct(self, params: Dict[str, Any], seed: int, workers: int) -> Tuple[Dict, List, Optional[pd.DataFrame]]:
        source = ConstructInput(**params)
        g, colouring, described = self.resolve_graph(source, seed)

        if colouring is None and g.n and g.is_regular() and g.n % (g.max_degree + 1) == 0:
            # frugal and frozen coincide on regular graphs
            colouring = first_colouring(g, g.max_degree + 1, "frugal")
            described["lift_detected"] = colouring is not None

        result: Dict[str, Any] = {
            "source": described,
            "n": g.n,
            "m": g.m,
            "delta": g.max_degree,
            "regular": g.is_regular(),
            "connected": is_connected(g),
            "girth": girth(g),
            "edges": g.edges,
            "colouring": list(colouring.colours) if colouring is not None else None,
        }
        if source.family in ("J", "beta"):
            result["labels"] = [j_label(v, source.delta) for v in range(g.n)]

        verdicts = []
        if colouring is not None:
            proper = is_proper(g, colouring)
            verdicts.append(verdict("colouring_proper", proper))
            frozen = proper and colouring.k == g.max_degree + 1 and is_frozen(g, colouring)
            result["frozen"] = frozen
            expected_frozen = source.family != "beta"
            verdicts.append(verdict("frozen" if expected_frozen else "not_frozen", frozen == expected_frozen))

        if source.graph_out:
            save_graph(g, source.graph_out, provenance={**described, "seed": seed})
            result["graph_file"] = source.graph_out
        if source.colouring_out and colouring is not None:
            save_colouring(colouring, source.colouring_out)
            result["colouring_file"] = source.colouring_out
        return result, verdicts, None

    def cmd_verify(self, params: Dict[str, Any], seed: int, workers: int) -> Tuple[Dict, List, Optional[pd.DataFrame]]:
        name = params.get("bound", "all")
        outcome = verification_tools.verify(name, params, seed, workers)
        if "error" in outcome:
            raise InputError(outcome["error"])
        return outcome["result"], outcome["verdicts"], None

    def cmd_random_regular_scan(self, params: Dict[str, Any], seed: int, workers: int) -> Tuple[Dict, List, Optional[pd.DataFrame]]:
        scan = ScanInput(**params)
        delta = scan.delta
        rows = []
        verdicts = []
        for n in scan.orders:
            if (n * delta) % 2 or n <= delta:
                logger.warning(f"Skipping n={n}: no simple {delta}-regular graph")
                continue
            tasks = [(n, delta, derive_seed(seed, "scan", n, i)) for i in range(scan.trials)]
            found = sum(parallel_map(_detect_sample, tasks, workers))
            frequency = found / scan.trials
            low, high = binomial_ci95(found, scan.trials)
            divisible = n % (delta + 1) == 0
            rows.append({
                "n": n,
                "trials": scan.trials,
                "frozen": found,
                "frequency": frequency,
                "ci_low": low,
                "ci_high": high,
                "log_ratio": frozen_existence_log_ratio(n, delta) if divisible else None,
            })
            logger.info(f"n={n}: frozen colouring in {found}/{scan.trials} samples")
            if not divisible:
                verdicts.append(verdict(f"divisibility_n{n}", found == 0, frequency=frequency))

        series = pd.DataFrame(rows)
        return {"delta": delta, "rows": rows}, verdicts, series

    def cmd_girth_hunt(self, params: Dict[str, Any], seed: int, workers: int) -> Tuple[Dict, List, Optional[pd.DataFrame]]:
        hunt = GirthHuntInput(**params)
        limit = girth_limit_probability(hunt.delta, hunt.girth)
        cycle_means = [
            empirical_cycle_mean(hunt.delta, hunt.copies, length, hunt.cycle_samples, derive_seed(seed, "cycle-means"))
            for length in range(3, hunt.girth)
        ] if hunt.cycle_samples else []

        context = {
            "delta": hunt.delta,
            "target_girth": hunt.girth,
            "copies": hunt.copies,
            "limit_probability": limit.probability,
            "limit_anomaly": limit.anomaly,
            "cycle_means": cycle_means,
        }
        for trial in range(hunt.max_trials):
            spec = random_lift_spec(hunt.delta, hunt.copies, derive_seed(seed, "girth", trial))
            g = build_lift(spec)
            observed = girth(g)
            if observed is None or observed >= hunt.girth:
                colouring = pullback_colouring(spec)
                frozen = is_frozen(g, colouring)
                logger.info(f"Girth witness after {trial + 1} trials: girth {observed}")
                if hunt.graph_out:
                    save_graph(g, hunt.graph_out, provenance={"family": "random-lift", "delta": hunt.delta,
                                                               "copies": hunt.copies, "seed": seed, "trial": trial})
                if hunt.colouring_out:
                    save_colouring(colouring, hunt.colouring_out)
                result = {**context, "trials": trial + 1, "girth": observed, "matchings": spec.matchings,
                          "colouring": list(colouring.colours)}
                return result, [verdict("witness_frozen", frozen, girth=observed)], None

        raise BudgetExceededError(
            f"No lift with girth >= {hunt.girth} in {hunt.max_trials} trials",
            partial={**context, "trials": hunt.max_trials, "failures": hunt.max_trials},
        )

    def run(self, experiment: ExperimentConfig) -> Tuple[Dict[str, Any], Optional[pd.DataFrame]]:
        """Run one experiment; never raises, failures become the payload status."""
        started = time.perf_counter()
        seed = experiment.resolved_seed()
        command = self.commands.get(experiment.command)
        series = None
        verdicts: List[Dict[str, Any]] = []

        try:
            if command is None:
                raise UnsupportedError(f"Unknown command {experiment.command!r}; expected one of {sorted(self.commands)}")
            logger.info(f"Running {experiment.command} with seed {seed}")
            with budget_overrides(experiment.budgets):
                result, verdicts, series = command(experiment.params, seed, experiment.workers)
            status = "ok"

        except BudgetExceededError as e:
            logger.error(f"Budget exhausted in {experiment.command}: {e}")
            result = {"error": str(e), "partial": e.partial}
            status = "partial"

        except (RecolorError, ValueError, OSError) as e:
            logger.error(f"Error running {experiment.command}: {e}")
            result = {"error": str(e)}
            status = "failed"

        payload = build_payload(experiment.command, seed, experiment.params, status, result, verdicts, started)
        return payload, series


# Global instance
experiment_tools = ExperimentTools()

"""
Glauber Dynamics

The single-site recolouring chain: each step picks a vertex v and a colour c
uniformly and independently, and recolours v with c when no neighbour of v
already has c. Provides seeded simulation, the level-set escape experiment on
J(2k), Monte-Carlo event estimates, exact stationary probabilities and exact
total-variation mixing profiles on small state spaces.
"""

import logging
import math
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from recolor.core.colourings.colouring import Colouring, enumerate_colourings, greedy_colouring, is_proper
from recolor.core.colourings.reconfiguration import RecolouringGraph, build_recolouring_graph
from recolor.core.graphs.constructions import JTag, in_level_set
from recolor.core.graphs.graph_core import Graph, connected_components
from recolor.core.utils.config import config
from recolor.core.utils.errors import (
    BudgetExceededError,
    InputError,
    ReducibleChainError,
    StructureError,
    UnsupportedError,
)
from recolor.core.utils.helpers import WorkBudget, chunk_range, make_rng, parallel_map

logger = logging.getLogger(__name__)

RESTRICTIONS = ("all", "nonfrozen")


class Chain:
    """Glauber dynamics state with its own Philox stream and step counter.

    Proposals are drawn in blocks of ``config.PROPOSAL_BLOCK`` with
    ``Generator.integers`` (unbiased), so a (seed, stream) pair fixes the
    whole trajectory.
    """

    def __init__(
        self,
        g: Graph,
        k: int,
        start: Colouring,
        seed: int,
        stream: int = 0,
        max_steps: Optional[int] = None,
    ):
        if start.k != k:
            raise InputError(f"Start colouring uses palette {start.k}, chain uses {k}")
        if not is_proper(g, start):
            raise InputError("The chain must start from a proper colouring")

        self.graph = g
        self.k = k
        self.state: List[int] = list(start.colours)
        self.seed = seed
        self.stream = stream
        self.rng = make_rng(seed, stream)
        self.steps = 0
        self.budget = WorkBudget(
            config.CHAIN_STEP_BUDGET if max_steps is None else max_steps,
            config.WALL_SECONDS_BUDGET or None,
            label="chain",
        )
        self._vertices: List[int] = []
        self._colours: List[int] = []

    def __repr__(self) -> str:
        return f"Chain(n={self.graph.n}, k={self.k}, steps={self.steps}, seed={self.seed}, stream={self.stream})"

    @property
    def colouring(self) -> Colouring:
        return Colouring(self.state, self.k)

    def propose(self, v: int, c: int) -> bool:
        """Apply the step rule to the proposal (v, c); returns True iff v changed colour."""
        self.budget.record()
        self.steps += 1
        state = self.state
        if state[v] == c:
            return False
        for u in self.graph.adjacency[v]:
            if state[u] == c:
                return False
        state[v] = c
        return True

    def _refill(self):
        block = config.PROPOSAL_BLOCK
        self._vertices = self.rng.integers(0, self.graph.n, size=block).tolist()[::-1]
        self._colours = self.rng.integers(1, self.k + 1, size=block).tolist()[::-1]

    def step(self) -> "Chain":
        if not self._vertices:
            self._refill()
        self.propose(self._vertices.pop(), self._colours.pop())
        return self

    def run(self, steps: int) -> "Chain":
        for _ in range(steps):
            self.step()
        return self


def step(chain: Chain) -> Chain:
    return chain.step()


# Events (picklable state predicates)

class Always:
    name = "always"

    def __call__(self, state: Sequence[int]) -> bool:
        return True


class Never:
    name = "never"

    def __call__(self, state: Sequence[int]) -> bool:
        return False


class IsFrozen:
    """No vertex can be recoloured: every closed neighbourhood shows all k colours."""

    name = "frozen"

    def __init__(self, g: Graph, k: int):
        self.g = g
        self.k = k

    def __call__(self, state: Sequence[int]) -> bool:
        for v in range(self.g.n):
            if len({state[v]} | {state[u] for u in self.g.adjacency[v]}) != self.k:
                return False
        return True


class VertexHasColour:
    def __init__(self, vertex: int, colour: int):
        self.vertex = vertex
        self.colour = colour
        self.name = f"vertex {vertex} has colour {colour}"

    def __call__(self, state: Sequence[int]) -> bool:
        return state[self.vertex] == self.colour


class OutsideLevelSet:
    def __init__(self, tag: JTag, level: int):
        self.tag = tag
        self.level = level
        self.name = f"outside S_{level}"

    def __call__(self, state: Sequence[int]) -> bool:
        return not in_level_set(state, self.tag, self.level)


Event = Callable[[Sequence[int]], bool]


# Level-set escape

def _check_tag(chain: Chain, tag: JTag):
    if chain.graph.n != tag.n or chain.k != tag.delta + 1:
        raise InputError(f"Chain on {chain.graph.n} vertices does not run on J({tag.fibers}) with Δ={tag.delta}")


def escape_time(chain: Chain, i: int, tag: JTag) -> int:
    """Steps until the state leaves S_i (0 if it starts outside)."""
    _check_tag(chain, tag)
    started = chain.steps
    try:
        while in_level_set(chain.state, tag, i):
            chain.step()
    except BudgetExceededError as exc:
        exc.partial = {"level": i, "steps": chain.steps - started}
        raise
    return chain.steps - started


def escape_times(chain: Chain, tag: JTag) -> List[int]:
    """τ_1..τ_k along one trajectory; non-decreasing since S_1 ⊆ ... ⊆ S_k."""
    _check_tag(chain, tag)
    started = chain.steps
    times: List[int] = []
    level = 1
    try:
        while True:
            while level <= tag.k_level and not in_level_set(chain.state, tag, level):
                times.append(chain.steps - started)
                level += 1
            if level > tag.k_level:
                return times
            chain.step()
    except BudgetExceededError as exc:
        exc.partial = {"escape_times": times, "steps": chain.steps - started}
        logger.warning(f"Escape run stopped by budget after levels {times}")
        raise


def geometric_escape_lower_tail(k_level: int, lam: float) -> float:
    """exp(-k(λ - 1 - log λ)), reported beside the empirical τ_k distribution."""
    if lam <= 0:
        raise InputError(f"λ must be positive, got {lam}")
    return math.exp(-k_level * (lam - 1 - math.log(lam)))


# Monte-Carlo estimates

class EventEstimate(BaseModel):
    """Monte-Carlo estimate of Pr(X_t ∈ event)."""
    event: str = Field(description="Event name")
    t: int = Field(description="Chain steps per trial")
    trials: int = Field(description="Independent trials")
    hits: int = Field(description="Trials ending inside the event")
    estimate: float = Field(description="hits / trials")
    ci95: Tuple[float, float] = Field(description="Wilson score 95% interval")
    seed: int = Field(description="Base seed; trial i uses Philox stream i")


def _run_trials(args) -> int:
    g, k, start, t, event, seed, first, stop, max_steps = args
    hits = 0
    for trial in range(first, stop):
        chain = Chain(g, k, start, seed, stream=trial, max_steps=max_steps).run(t)
        if event(chain.state):
            hits += 1
    return hits


def binomial_ci95(hits: int, trials: int) -> Tuple[float, float]:
    """Wilson score interval with z the 97.5% normal quantile; stays inside [0, 1]."""
    if trials < 1:
        raise InputError(f"Need at least one trial, got {trials}")
    z2 = config.Z_95 ** 2
    p = hits / trials
    denom = 1 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = config.Z_95 * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def event_probability_estimate(
    g: Graph,
    k: int,
    start: Colouring,
    t: int,
    event: Event,
    trials: int,
    seed: int,
    workers: int = 1,
    max_steps: Optional[int] = None,
) -> EventEstimate:
    if trials < 1:
        raise InputError(f"Need at least one trial, got {trials}")
    if t < 0:
        raise InputError(f"Step count must be non-negative, got {t}")

    pieces = chunk_range(trials, workers)
    max_steps = config.CHAIN_STEP_BUDGET if max_steps is None else max_steps
    tasks = [(g, k, start, t, event, seed, first, stop, max_steps) for first, stop in pieces]
    hits = sum(parallel_map(_run_trials, tasks, workers))

    estimate = EventEstimate(
        event=getattr(event, "name", type(event).__name__),
        t=t,
        trials=trials,
        hits=hits,
        estimate=hits / trials,
        ci95=binomial_ci95(hits, trials),
        seed=seed,
    )
    logger.info(f"Estimated Pr({estimate.event} at t={t}) = {estimate.estimate:.4f} over {trials} trials")
    return estimate


def sample_colouring(g: Graph, steps: int, seed: int) -> Colouring:
    """Run the chain with Δ+1 colours from the greedy colouring for `steps` steps."""
    k = g.max_degree + 1
    chain = Chain(g, k, greedy_colouring(g, k), seed)
    return chain.run(steps).colouring


# Exact stationary probabilities

def stationary_event_probability(
    g: Graph,
    k: int,
    event: Event,
    restrict: str = "nonfrozen",
    max_nodes: Optional[int] = None,
) -> Fraction:
    """Exact π(event) under the uniform measure on Ω (or on its non-frozen part).

    Enumerates Ω within the stationary budget. When that is infeasible, the
    event "vertex v has colour c" falls back to 1/k: permuting colours maps
    frozen colourings to frozen ones, so it preserves both Ω and its
    non-frozen part and acts transitively on the colour of v.
    """
    if restrict not in RESTRICTIONS:
        raise InputError(f"Unknown restriction {restrict!r}; expected one of {RESTRICTIONS}")

    frozen = IsFrozen(g, k)
    tally = {"states": 0, "hits": 0}

    def visit(state):
        if restrict == "nonfrozen" and frozen(state):
            return
        tally["states"] += 1
        if event(state):
            tally["hits"] += 1

    try:
        enumerate_colourings(
            g, k, "all", on_colouring=visit,
            max_nodes=config.STATIONARY_ENUMERATION_BUDGET if max_nodes is None else max_nodes,
        )
    except BudgetExceededError:
        if isinstance(event, VertexHasColour) and 1 <= event.colour <= k:
            logger.warning(f"State space too large to enumerate; using colour symmetry for {event.name}")
            return Fraction(1, k)
        raise UnsupportedError(f"Cannot enumerate Ω and no symmetry route applies to {getattr(event, 'name', event)}")

    if tally["states"] == 0:
        raise UnsupportedError(f"The {restrict} state set is empty")
    return Fraction(tally["hits"], tally["states"])


# Exact mixing

def total_variation(mu: Sequence, nu: Sequence):
    """Half the L1 distance; exact when both inputs are rational."""
    if len(mu) != len(nu):
        raise InputError(f"Distributions over {len(mu)} and {len(nu)} states")
    if all(isinstance(x, (int, Fraction)) for x in list(mu) + list(nu)):
        return sum((abs(Fraction(a) - Fraction(b)) for a, b in zip(mu, nu)), Fraction(0)) / 2
    return 0.5 * float(np.abs(np.asarray(mu, dtype=float) - np.asarray(nu, dtype=float)).sum())


def total_variation_by_events(mu: Sequence, nu: Sequence):
    """max over events A of |μ(A) - ν(A)|, by brute force over all 2^N events."""
    if len(mu) != len(nu):
        raise InputError(f"Distributions over {len(mu)} and {len(nu)} states")
    if len(mu) > 20:
        raise InputError("Event enumeration is limited to 20 states")

    best = 0
    states = range(len(mu))
    for size in range(len(mu) + 1):
        for event in combinations(states, size):
            gap = abs(sum(mu[i] for i in event) - sum(nu[i] for i in event))
            best = max(best, gap)
    return best


def transition_matrix(rg: RecolouringGraph, restrict: str = "all") -> Tuple[np.ndarray, List[int]]:
    """Dense kernel on the kept states: each of the n·k proposals has mass 1/(n·k).

    Every meta-neighbour is reached by exactly one proposal and the rest of
    the mass stays on the diagonal. Frozen states have no moves, so dropping
    them keeps the remaining rows stochastic.
    """
    if restrict not in RESTRICTIONS:
        raise InputError(f"Unknown restriction {restrict!r}; expected one of {RESTRICTIONS}")

    kept = list(range(len(rg))) if restrict == "all" else [i for i in range(len(rg)) if rg.degree(i)]
    if len(kept) > config.MAX_DENSE_STATES:
        raise UnsupportedError(f"Dense transition matrix refused above {config.MAX_DENSE_STATES} states, got {len(kept)}")

    position = {state: row for row, state in enumerate(kept)}
    mass = 1.0 / (rg.g.n * rg.k)
    P = np.zeros((len(kept), len(kept)))
    for row, i in enumerate(kept):
        for j in rg.neighbours(i):
            P[row, position[j]] = mass
        P[row, row] = 1.0 - mass * rg.degree(i)

    return P, kept


def _check_irreducible(rg: RecolouringGraph, kept: List[int]):
    kept_set = set(kept)
    sub = Graph(len(rg), [(i, j) for i, j in rg.edges if i in kept_set and j in kept_set])
    count = sum(1 for c in connected_components(sub) if next(iter(c)) in kept_set)
    if count != 1:
        raise ReducibleChainError(f"Chain restricted to {len(kept)} states has {count} communicating classes", count)


class TVProfile(BaseModel):
    """Worst-start total-variation distance to uniform, d(0..t_max)."""
    d: List[float] = Field(description="d(t) for t = 0..t_max")
    t_mix_at: Dict[str, Optional[int]] = Field(description="ε -> first t with d(t) <= ε, None if beyond t_max")
    states: int = Field(description="Size of the restricted state set")
    restrict: str = Field(description="all or nonfrozen")


def _chain_kernel(g: Graph, k: int, restrict: str) -> Tuple[np.ndarray, List[int]]:
    rg = build_recolouring_graph(g, k)
    P, kept = transition_matrix(rg, restrict)
    _check_irreducible(rg, kept)
    return P, kept


def exact_tv_profile(
    g: Graph,
    k: int,
    t_max: Optional[int] = None,
    restrict: str = "all",
    epsilons: Sequence[float] = (config.DEFAULT_EPSILON,),
) -> TVProfile:
    t_max = config.DEFAULT_TV_HORIZON if t_max is None else t_max
    P, _ = _chain_kernel(g, k, restrict)
    return tv_profile_from_kernel(P, t_max, restrict, epsilons)


def tv_profile_from_kernel(
    P: np.ndarray,
    t_max: int,
    restrict: str = "all",
    epsilons: Sequence[float] = (config.DEFAULT_EPSILON,),
) -> TVProfile:
    """d(0..t_max) for a symmetric kernel P, whose stationary law is uniform.

    d(t) never increases for such a kernel; an increase beyond the tolerance
    raises StructureError.
    """
    if t_max < 0:
        raise InputError(f"Horizon must be non-negative, got {t_max}")
    size = P.shape[0]
    uniform = 1.0 / size
    M = np.eye(size)
    d = []
    for t in range(t_max + 1):
        d.append(float(0.5 * np.abs(M - uniform).sum(axis=1).max()))
        if t < t_max:
            M = M @ P

    rises = np.flatnonzero(np.diff(d) > config.TV_TOLERANCE)
    if rises.size:
        t = int(rises[0])
        raise StructureError(f"d(t) increased from {d[t]:.6g} at t={t} to {d[t + 1]:.6g}; the kernel is not symmetric and stochastic")

    t_mix_at = {
        f"{eps:g}": next((t for t, value in enumerate(d) if value <= eps), None)
        for eps in epsilons
    }
    logger.info(f"Exact TV profile on {size} states: d(0)={d[0]:.6f}, t_mix={t_mix_at}")
    return TVProfile(d=d, t_mix_at=t_mix_at, states=size, restrict=restrict)


def mixing_time(g: Graph, k: int, epsilon: float = config.DEFAULT_EPSILON, restrict: str = "all") -> int:
    """Exact t_mix(ε) by doubling then bisection, with P^t from the symmetric eigendecomposition."""
    P, kept = _chain_kernel(g, k, restrict)
    eigenvalues, Q = np.linalg.eigh(P)
    uniform = 1.0 / len(kept)

    def distance(t: int) -> float:
        Pt = (Q * eigenvalues ** t) @ Q.T
        return float(0.5 * np.abs(Pt - uniform).sum(axis=1).max())

    if distance(0) <= epsilon:
        return 0

    high = 1
    while distance(high) > epsilon:
        high *= 2
        if high > config.CHAIN_STEP_BUDGET:
            raise BudgetExceededError(f"t_mix({epsilon}) exceeds {config.CHAIN_STEP_BUDGET} steps")

    low = high // 2
    while high - low > 1:
        middle = (low + high) // 2
        if distance(middle) <= epsilon:
            high = middle
        else:
            low = middle
    return high

"""
Bounds

Closed-form evaluators for the counting formulas and probability bounds on
frozen colourings, plus `verify_bound`, which pits each formula against an
exhaustive oracle and reports the verdict.

Integer formulas use exact big-integer arithmetic and probabilities are
exact rationals whenever both sides are rational; floats appear only in
logs and asymptotic estimates.
"""

import logging
import math
from fractions import Fraction
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer

from recolor.core.colourings.colouring import (
    LinearOrder,
    PartialColouring,
    count_colourings,
    ext,
    ext_degree,
    ext_frugal,
    first_colouring,
)
from recolor.core.data.corpus import ext_sandwich_instance, labelled_regular_graphs
from recolor.core.graphs.constructions import build_J, random_lift
from recolor.core.graphs.graph_core import Graph, count_cycles, has_clique, is_connected
from recolor.core.utils.errors import BudgetExceededError, InputError
from recolor.core.utils.helpers import derive_seed, fraction_str

logger = logging.getLogger(__name__)

SIX_SEVENTHS = Fraction(6, 7)


class BoundReport(BaseModel):
    """A formula value against its oracle, with the verdict of the stated inequality."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str = Field(description="Bound identifier")
    params: Dict[str, Any] = Field(default_factory=dict, description="Inputs of the check")
    formula_value: Optional[Any] = Field(default=None, description="Closed-form side")
    oracle_value: Optional[Any] = Field(default=None, description="Exhaustively computed side, absent if infeasible")
    satisfied: Optional[bool] = Field(default=None, description="Verdict; None when undetermined")
    slack: Optional[float] = Field(default=None, description="oracle / formula")
    details: Dict[str, Any] = Field(default_factory=dict, description="Intermediate counts and notes")

    @field_serializer("formula_value", "oracle_value")
    def _serialize_exact(self, value):
        return fraction_str(value)

    @field_serializer("details")
    def _serialize_details(self, value):
        return {key: fraction_str(item) if isinstance(item, Fraction) else item for key, item in value.items()}


class CycleMean(NamedTuple):
    value: Fraction
    anomaly: bool


class GirthLimit(NamedTuple):
    probability: float
    anomaly: bool


# Closed forms

def _check_theorem1(n: int, delta: int):
    if not 3 <= delta <= n - 2:
        raise InputError(f"The frozen-probability bound needs 3 <= Δ <= n-2, got n={n}, Δ={delta}")


def theorem1_bound(n: int, delta: int) -> Union[Fraction, float]:
    """(6/7)^{n/(Δ+1)}; exact when (Δ+1) divides n."""
    _check_theorem1(n, delta)
    if n % (delta + 1) == 0:
        return SIX_SEVENTHS ** (n // (delta + 1))
    return (6 / 7) ** (n / (delta + 1))


def satisfies_theorem1(ratio: Fraction, n: int, delta: int) -> bool:
    """ratio <= (6/7)^{n/(Δ+1)}, decided exactly as ratio^{Δ+1} <= (6/7)^n."""
    return Fraction(ratio) ** (delta + 1) <= SIX_SEVENTHS ** n


def frozen_count_bounds(l: int, delta: int) -> Tuple[int, int]:
    """(((Δ-1)!)^l, (2(Δ+1)!)^l): the envelope for frozen and all colourings of J(l)."""
    if l < 2 or delta < 2:
        raise InputError(f"Need l >= 2 and Δ >= 2, got l={l}, Δ={delta}")
    return math.factorial(delta - 1) ** l, (2 * math.factorial(delta + 1)) ** l


def j_frozen_ratio_lower(l: int, delta: int) -> Fraction:
    """((Δ-1)! / (2(Δ+1)!))^l = (1/(2(Δ+1)Δ))^l."""
    lower, upper = frozen_count_bounds(l, delta)
    return Fraction(lower, upper)


def many_frozen_lower_bound(n: int, delta: int) -> float:
    """exp(-3·log(Δ)/Δ · n)."""
    if delta < 2:
        raise InputError(f"Need Δ >= 2, got {delta}")
    return math.exp(-3 * math.log(delta) / delta * n)


def greedy_upper(n: int, delta: int) -> int:
    """(Δ+1)·Δ^{n-1}: colour a connected graph along an exploration order."""
    if n < 1:
        raise InputError(f"Need n >= 1, got {n}")
    return (delta + 1) * delta ** (n - 1)


def lift_pair_count(n: int, delta: int) -> int:
    """Pairs (lift of K_{Δ+1}, compatible frozen colouring) on n labelled vertices:
    multinomial(n; k, ..., k) · (k!)^{C(Δ+1, 2)} with k = n/(Δ+1)."""
    if n % (delta + 1):
        raise InputError(f"Δ+1 = {delta + 1} must divide n = {n}")
    k = n // (delta + 1)
    multinomial = math.factorial(n) // math.factorial(k) ** (delta + 1)
    return multinomial * math.factorial(k) ** math.comb(delta + 1, 2)


def log_regular_count_asymptotic(n: int, delta: int) -> float:
    """log of √2·e^{(1-Δ²)/4}·(n^Δ Δ^Δ / (e^Δ (Δ!)²))^{n/2}."""
    if (n * delta) % 2:
        raise InputError(f"n·Δ must be even, got n={n}, Δ={delta}")
    if n < 1 or delta < 1:
        raise InputError(f"Need n, Δ >= 1, got n={n}, Δ={delta}")
    inner = delta * math.log(n) + delta * math.log(delta) - delta - 2 * math.lgamma(delta + 1)
    return 0.5 * math.log(2) + (1 - delta ** 2) / 4 + n / 2 * inner


def regular_count_asymptotic(n: int, delta: int) -> float:
    log_value = log_regular_count_asymptotic(n, delta)
    return math.exp(log_value) if log_value < 709 else math.inf


def frozen_existence_log_ratio(n: int, delta: int) -> float:
    """log l(n,Δ) - log r(n,Δ); negative and linear in n for Δ >= 3."""
    return math.log(lift_pair_count(n, delta)) - log_regular_count_asymptotic(n, delta)


def poisson_cycle_mean(delta: int, l: int) -> CycleMean:
    """λ_l = (d+1)d(d-1)^{l-3}(d-3)/(2l), evaluated as printed.

    The factor (d-3) vanishes at d = 3; the flag marks that case instead of
    substituting another formula.
    """
    if l < 3:
        raise InputError(f"Cycle length must be at least 3, got {l}")
    d = delta
    value = Fraction((d + 1) * d * (d - 1) ** (l - 3) * (d - 3), 2 * l)
    return CycleMean(value, d == 3)


def girth_limit_probability(delta: int, g: int) -> GirthLimit:
    """exp(-Σ_{l=3}^{g-1} λ_l), the limiting probability of girth >= g."""
    if g < 3:
        raise InputError(f"Girth target must be at least 3, got {g}")
    means = [poisson_cycle_mean(delta, l) for l in range(3, g)]
    total = sum((m.value for m in means), Fraction(0))
    return GirthLimit(math.exp(-float(total)), any(m.anomaly for m in means))


def whp_exponent(x: float) -> float:
    """f(x) = 2x + x·log(1+1/x) - 3·log(x+1) - log(2π)."""
    if x <= 0:
        raise InputError(f"x must be positive, got {x}")
    return 2 * x + x * math.log(1 + 1 / x) - 3 * math.log(x + 1) - math.log(2 * math.pi)


def count_labelled_regular(n: int, delta: int) -> int:
    """Exact number of labelled Δ-regular graphs on n vertices (small n)."""
    return sum(1 for _ in labelled_regular_graphs(n, delta))


class CycleCountEstimate(BaseModel):
    """Mean number of cycles of one length over random lifts."""
    length: int = Field(description="Cycle length")
    samples: int = Field(description="Number of random lifts")
    mean: float = Field(description="Sample mean of the cycle count")
    stderr: float = Field(description="Standard error of the mean")
    formula: float = Field(description="λ_l as printed")
    anomaly: bool = Field(description="True when the printed formula degenerates (d = 3)")


def empirical_cycle_mean(delta: int, k: int, length: int, samples: int, seed: int) -> CycleCountEstimate:
    if samples < 1:
        raise InputError(f"Need at least one sample, got {samples}")
    counts = np.array([
        count_cycles(random_lift(delta, k, derive_seed(seed, "cycles", i)), length)
        for i in range(samples)
    ], dtype=float)
    mean_value = poisson_cycle_mean(delta, length)
    stderr = float(counts.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return CycleCountEstimate(
        length=length,
        samples=samples,
        mean=float(counts.mean()),
        stderr=stderr,
        formula=float(mean_value.value),
        anomaly=mean_value.anomaly,
    )


# Oracle comparisons

def frugal_ratio(g: Graph, k: int, max_nodes: Optional[int] = None) -> Fraction:
    """|Ω^f(G)| / |Ω(G)| with k colours; 1 for the empty graph."""
    total = count_colourings(g, k, "all", max_nodes=max_nodes)
    if total == 0:
        raise InputError(f"No proper {k}-colouring exists")
    return Fraction(count_colourings(g, k, "frugal", max_nodes=max_nodes), total)


def _slack(oracle, formula) -> Optional[float]:
    try:
        return float(Fraction(oracle) / Fraction(formula)) if formula else None
    except (TypeError, ValueError):
        return float(oracle) / float(formula) if formula else None


def _verify_theorem1(graph: Graph, **_) -> BoundReport:
    n, delta = graph.n, graph.max_degree
    report = BoundReport(name="theorem1", params={"n": n, "delta": delta})
    if not is_connected(graph):
        report.details["note"] = "graph is not connected"
        return report
    try:
        formula = theorem1_bound(n, delta)
    except InputError as e:
        report.details["note"] = str(e)
        return report

    frozen = count_colourings(graph, delta + 1, "frozen")
    total = count_colourings(graph, delta + 1, "all")
    ratio = Fraction(frozen, total)
    report.formula_value = formula
    report.oracle_value = ratio
    report.satisfied = satisfies_theorem1(ratio, n, delta)
    report.slack = _slack(ratio, formula)
    report.details.update({"frozen": frozen, "all": total})
    return report


def _verify_greedy_upper(graph: Graph, k: Optional[int] = None, **_) -> BoundReport:
    n, delta = graph.n, graph.max_degree
    k = delta + 1 if k is None else k
    report = BoundReport(name="greedy_upper", params={"n": n, "delta": delta, "k": k})
    if not is_connected(graph):
        report.details["note"] = "graph is not connected"
        return report

    total = count_colourings(graph, k, "all")
    formula = greedy_upper(n, delta)
    report.formula_value = formula
    report.oracle_value = total
    report.satisfied = total <= formula
    report.slack = _slack(total, formula)
    return report


def _verify_lemma_main(graph: Graph, x: Optional[int] = None, **_) -> BoundReport:
    n, delta = graph.n, graph.max_degree
    if x is None:
        x = next((v for v in range(n) if graph.degree(v) == delta), 0)
    report = BoundReport(name="lemma_main", params={"n": n, "delta": delta, "x": x})

    problems = []
    if not 3 <= delta <= n - 1:
        problems.append("needs 3 <= Δ <= n-1")
    if graph.degree(x) != delta:
        problems.append("x must have degree Δ")
    if has_clique(graph, delta + 1):
        problems.append("graph contains a (Δ+1)-clique")
    if problems:
        report.details["note"] = "; ".join(problems)
        return report

    rest, _ = graph.remove_vertices(graph.neighbour_set(x) | {x})
    ratio = frugal_ratio(graph, delta + 1)
    ratio_rest = frugal_ratio(rest, delta + 1)
    formula = SIX_SEVENTHS * ratio_rest

    report.formula_value = formula
    report.oracle_value = ratio
    report.satisfied = ratio <= formula
    report.slack = _slack(ratio, formula)
    report.details.update({"remaining_ratio": ratio_rest, "remaining_n": rest.n})
    return report


def _verify_ext_sandwich(
    graph: Optional[Graph] = None,
    t=None,
    beta: Optional[PartialColouring] = None,
    sigma: Optional[LinearOrder] = None,
    seed: Optional[int] = None,
    **_,
) -> BoundReport:
    if graph is None:
        if seed is None:
            raise InputError("ext_sandwich needs an explicit instance or a seed")
        graph, t, beta, sigma = ext_sandwich_instance(seed)
    t = frozenset(t or ())

    frugal = ext_frugal(graph, t, beta)
    degree = ext_degree(graph, t, sigma, k=beta.k)
    proper = ext(graph, t, beta)
    return BoundReport(
        name="ext_sandwich",
        params={"n": graph.n, "delta": graph.max_degree, "t": sorted(t), "suffix": sigma.is_suffix(t)},
        formula_value=degree,
        oracle_value=proper,
        satisfied=frugal <= degree <= proper,
        details={"ext_frugal": frugal, "ext_degree": degree, "ext": proper},
    )


def _verify_frozen_count(l: int = 2, delta: int = 3, **_) -> BoundReport:
    lower, upper = frozen_count_bounds(l, delta)
    g = build_J(l, delta)
    frozen = count_colourings(g, delta + 1, "frozen")
    total = count_colourings(g, delta + 1, "all")
    return BoundReport(
        name="frozen_count",
        params={"l": l, "delta": delta},
        formula_value=f"[{lower}, {upper}]",
        oracle_value=f"frozen={frozen}, all={total}",
        satisfied=lower <= frozen <= total <= upper,
        slack=_slack(frozen, lower),
        details={"lower": lower, "upper": upper, "frozen": frozen, "all": total},
    )


def _verify_many_frozen(l: int = 2, delta: int = 3, **_) -> BoundReport:
    g = build_J(l, delta)
    ratio = Fraction(count_colourings(g, delta + 1, "frozen"), count_colourings(g, delta + 1, "all"))
    lower = j_frozen_ratio_lower(l, delta)
    exponential = many_frozen_lower_bound(g.n, delta)
    return BoundReport(
        name="many_frozen",
        params={"l": l, "delta": delta, "n": g.n},
        formula_value=lower,
        oracle_value=ratio,
        satisfied=ratio >= lower and float(lower) >= exponential,
        slack=_slack(ratio, lower),
        details={"exponential_lower": exponential},
    )


def _verify_lift_pair_count(n: int = 6, delta: int = 2, **_) -> BoundReport:
    formula = lift_pair_count(n, delta)
    graphs = 0
    total = 0
    for g in labelled_regular_graphs(n, delta):
        graphs += 1
        total += count_colourings(g, delta + 1, "frozen")
    return BoundReport(
        name="lift_pair_count",
        params={"n": n, "delta": delta},
        formula_value=formula,
        oracle_value=total,
        satisfied=total == formula,
        slack=_slack(total, formula),
        details={"labelled_graphs": graphs},
    )


def _verify_regular_count(n: int = 4, delta: int = 3, **_) -> BoundReport:
    exact = count_labelled_regular(n, delta)
    estimate = regular_count_asymptotic(n, delta)
    return BoundReport(
        name="regular_count",
        params={"n": n, "delta": delta},
        formula_value=estimate,
        oracle_value=exact,
        slack=exact / estimate if estimate else None,
        details={"note": "asymptotic estimate; compared, not judged"},
    )


def _verify_theorem1_induction(graph: Graph, **_) -> BoundReport:
    """Chain the ratio step along the closed neighbourhoods of one colour class
    of a frozen colouring: H_1 = G, H_{i+1} = H_i - N[x_i]."""
    n, delta = graph.n, graph.max_degree
    k = delta + 1
    report = BoundReport(name="theorem1_induction", params={"n": n, "delta": delta})

    frozen = first_colouring(graph, k, "frozen")
    if frozen is None:
        report.satisfied = True
        report.oracle_value = Fraction(0)
        report.details["note"] = "no frozen colouring"
        return report

    centres = sorted(frozen.classes()[1])
    h, labels = graph, tuple(range(n))
    ratios: List[Fraction] = []
    for x in centres:
        local = labels.index(x)
        ratios.append(frugal_ratio(h, k))
        h, kept = h.remove_vertices(h.neighbour_set(local) | {local})
        labels = tuple(labels[i] for i in kept)
    ratios.append(frugal_ratio(h, k))

    steps = [ratios[i] <= SIX_SEVENTHS * ratios[i + 1] for i in range(len(centres))]
    bound = SIX_SEVENTHS ** len(centres)
    report.formula_value = bound
    report.oracle_value = ratios[0]
    report.satisfied = all(steps) and ratios[0] <= bound
    report.slack = _slack(ratios[0], bound)
    report.details.update({"ratios": [fraction_str(r) for r in ratios], "steps": steps})
    return report


VERIFIERS: Dict[str, Callable[..., BoundReport]] = {
    "theorem1": _verify_theorem1,
    "greedy_upper": _verify_greedy_upper,
    "lemma_main": _verify_lemma_main,
    "ext_sandwich": _verify_ext_sandwich,
    "frozen_count": _verify_frozen_count,
    "many_frozen": _verify_many_frozen,
    "lift_pair_count": _verify_lift_pair_count,
    "regular_count": _verify_regular_count,
    "theorem1_induction": _verify_theorem1_induction,
}


def verify_bound(name: str, graph: Optional[Graph] = None, **params) -> BoundReport:
    """Evaluate bound `name` against its oracle; an infeasible oracle leaves the verdict open."""
    verifier = VERIFIERS.get(name)
    if verifier is None:
        raise InputError(f"Unknown bound {name!r}; expected one of {sorted(VERIFIERS)}")

    try:
        if graph is not None:
            params["graph"] = graph
        report = verifier(**params)
    except BudgetExceededError as e:
        logger.warning(f"Oracle for {name} ran out of budget: {e}")
        return BoundReport(name=name, params={k: v for k, v in params.items() if k != "graph"},
                           details={"note": f"oracle infeasible: {e}", "partial": e.partial})
    logger.info(f"Bound {name}: satisfied={report.satisfied}")
    return report

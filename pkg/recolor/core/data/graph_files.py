"""
Graph and Colouring Files

Text formats shared by every command:

* graph: optional ``# provenance: {json}`` header, ``#`` comments, then a
  line ``n m`` followed by m lines ``u v``. Labels are 0-based; files whose
  labels run 1..n are remapped on load.
* colouring: ``k`` on the first line, then n lines ``vertex colour``.
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional, Tuple

from recolor.core.colourings.colouring import Colouring
from recolor.core.graphs.graph_core import Graph, build_graph
from recolor.core.utils.errors import InputError

logger = logging.getLogger(__name__)

PROVENANCE_PREFIX = "# provenance:"


def _data_lines(text: str) -> Tuple[List[List[str]], Dict[str, Any]]:
    rows = []
    provenance: Dict[str, Any] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith(PROVENANCE_PREFIX):
            try:
                provenance = json.loads(line[len(PROVENANCE_PREFIX):])
            except json.JSONDecodeError as e:
                raise InputError(f"Malformed provenance header: {e}")
            continue
        if not line or line.startswith("#"):
            continue
        rows.append(line.split())
    return rows, provenance


def format_graph(g: Graph, provenance: Optional[Dict[str, Any]] = None) -> str:
    lines = []
    if provenance is not None:
        lines.append(f"{PROVENANCE_PREFIX} {json.dumps(provenance, sort_keys=True, default=str)}")
    lines.append(f"{g.n} {g.m}")
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges))
    return "\n".join(lines) + "\n"


def parse_graph(text: str, one_based: Optional[bool] = None) -> Tuple[Graph, Dict[str, Any]]:
    """Parse the graph text format; returns the graph and its provenance header.

    With ``one_based=None`` the labelling is detected: a file that uses label
    n and never label 0 is treated as 1-based.
    """
    rows, provenance = _data_lines(text)
    if not rows:
        raise InputError("Graph file has no header line")

    try:
        n, m = int(rows[0][0]), int(rows[0][1])
        pairs = [(int(r[0]), int(r[1])) for r in rows[1:]]
    except (IndexError, ValueError) as e:
        raise InputError(f"Malformed graph file: {e}")

    if len(pairs) != m:
        raise InputError(f"Header announces {m} edges, file lists {len(pairs)}")

    if one_based is None:
        labels = {x for pair in pairs for x in pair}
        one_based = bool(labels) and n in labels and 0 not in labels
    if one_based:
        pairs = [(u - 1, v - 1) for u, v in pairs]

    return build_graph(n, pairs), provenance


def save_graph(g: Graph, path: str, provenance: Optional[Dict[str, Any]] = None):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w") as f:
        f.write(format_graph(g, provenance))
    logger.debug(f"Saved {g} to {path}")


def load_graph(path: str, one_based: Optional[bool] = None) -> Tuple[Graph, Dict[str, Any]]:
    with open(path) as f:
        return parse_graph(f.read(), one_based)


def format_colouring(a: Colouring) -> str:
    lines = [str(a.k)]
    lines.extend(f"{v} {c}" for v, c in enumerate(a.colours))
    return "\n".join(lines) + "\n"


def parse_colouring(text: str, n: Optional[int] = None) -> Colouring:
    rows, _ = _data_lines(text)
    if not rows:
        raise InputError("Colouring file has no palette line")

    try:
        k = int(rows[0][0])
        assignment = {int(r[0]): int(r[1]) for r in rows[1:]}
    except (IndexError, ValueError) as e:
        raise InputError(f"Malformed colouring file: {e}")

    size = len(assignment) if n is None else n
    if sorted(assignment) != list(range(size)):
        raise InputError(f"Colouring file must list every vertex 0..{size - 1} exactly once")
    return Colouring((assignment[v] for v in range(size)), k)


def save_colouring(a: Colouring, path: str):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w") as f:
        f.write(format_colouring(a))


def load_colouring(path: str, n: Optional[int] = None) -> Colouring:
    with open(path) as f:
        return parse_colouring(f.read(), n)

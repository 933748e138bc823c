"""
Result Exports

Experiment payloads and data series. Every payload has the shape
{command, seed, params, status, result, verdicts, meta}; only `meta`
(timestamp, elapsed seconds) varies between replays of the same seed.
"""

import json
import logging
import os
import time
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel

from recolor.core.utils.helpers import fraction_str, utc_timestamp

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv")


def to_jsonable(value: Any) -> Any:
    """Recursively convert records, rationals, tuples and numpy scalars for json.dump."""
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump(mode="json"))
    if isinstance(value, Fraction):
        return fraction_str(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [to_jsonable(v) for v in items]
    if isinstance(value, np.generic):
        return value.item()
    return value


def verdict(name: str, satisfied: Optional[bool], **details) -> Dict[str, Any]:
    return {"name": name, "satisfied": satisfied, **to_jsonable(details)}


def build_payload(
    command: str,
    seed: Optional[int],
    params: Dict[str, Any],
    status: str,
    result: Dict[str, Any],
    verdicts: List[Dict[str, Any]],
    started: float,
) -> Dict[str, Any]:
    return {
        "command": command,
        "seed": seed,
        "params": to_jsonable(params),
        "status": status,
        "result": to_jsonable(result),
        "verdicts": verdicts,
        "meta": {"timestamp": utc_timestamp(), "elapsed": round(time.perf_counter() - started, 6)},
    }


def replayable(payload: Dict[str, Any]) -> Dict[str, Any]:
    """The payload without its timing metadata."""
    return {key: value for key, value in payload.items() if key != "meta"}


def all_satisfied(payload: Dict[str, Any]) -> bool:
    return all(v.get("satisfied") is True for v in payload.get("verdicts", []))


def series_frame(**columns: Iterable) -> pd.DataFrame:
    """Plot-ready series, e.g. series_frame(t=..., d=...)."""
    return pd.DataFrame({name: list(values) for name, values in columns.items()})


def _ensure_parent(path: str):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def write_payload(payload: Dict[str, Any], path: str, fmt: str = "json", series: Optional[pd.DataFrame] = None) -> List[str]:
    """Write the payload (and with fmt='csv' its series next to it); returns the written paths."""
    if fmt not in FORMATS:
        raise ValueError(f"Unknown format {fmt!r}; expected one of {FORMATS}")

    _ensure_parent(path)
    written = []
    json_path = path if fmt == "json" else os.path.splitext(path)[0] + ".json"
    if fmt == "csv":
        frame = series if series is not None else pd.DataFrame([payload["result"]])
        frame.to_csv(path, index=False)
        written.append(path)

    with open(json_path, "w") as f:
        json.dump(payload, f, indent=2, default=str)
    written.append(json_path)

    logger.debug(f"Wrote {written}")
    return written


def write_json_lines(records: Iterable[Any], path: str):
    """One JSON document per line, for aggregating bound reports."""
    _ensure_parent(path)
    with open(path, "w") as f:
        for record in records:
            f.write(json.dumps(to_jsonable(record), default=str) + "\n")
